#pragma once

#include <stdexcept>

namespace uwloc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// channel model
class DegenerateFit : public Error {
 public:
  using Error::Error;
};
class InvalidDistance : public Error {
 public:
  using Error::Error;
};

// network
class UnknownNode : public Error {
 public:
  using Error::Error;
};
class InvalidAnchor : public Error {
 public:
  using Error::Error;
};

// self-positioning
class MissingMeasurement : public Error {
 public:
  using Error::Error;
};
class NoNeighbors : public Error {
 public:
  using Error::Error;
};

// squared-range least squares
class RankDeficient : public Error {
 public:
  using Error::Error;
};
class NearSingular : public Error {
 public:
  using Error::Error;
};
class NoBracket : public Error {
 public:
  using Error::Error;
};

// file formats
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace uwloc
