#pragma once

namespace uwloc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace uwloc
