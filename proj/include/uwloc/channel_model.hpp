#pragma once

#include <span>

#include "uwloc/errors.hpp"
#include "uwloc/rng.hpp"

namespace uwloc {

// Fitted channel constants from the underwater measurement campaign, plus
// the shared experiment defaults.
inline constexpr double kDefaultSlopeA = -8.5;        // dB/m
inline constexpr double kDefaultInterceptB = -54.85;  // dB
inline constexpr double kDefaultNoiseVar = 1.15;      // dB^2
inline constexpr double kDefaultTxPowerDbm = 20.0;
inline constexpr double kDefaultSigmaD = 0.63;  // m
inline constexpr double kMinDistance = 0.01;    // m, floor for sampled ranges

/// Linear gain-vs-distance model: gain = slope_a * d + intercept_b + noise,
/// with gain defined as p_rx - p_tx in dB (negative in water).
struct ChannelModel {
  double slope_a = kDefaultSlopeA;
  double intercept_b = kDefaultInterceptB;
  double noise_var = kDefaultNoiseVar;
};

struct GainSample {
  double distance_m = 0.0;
  double gain_db = 0.0;
};

/// Least-squares fit of (slope, intercept) to gain samples; noise_var is the
/// mean squared residual of the fit. Throws DegenerateFit when fewer than two
/// distinct distances are present.
ChannelModel fit_linear_model(std::span<const GainSample> samples);

/// Mean squared residual of `samples` against `model`.
double estimate_noise_variance(std::span<const GainSample> samples,
                               const ChannelModel& model);

/// Deterministic gain at distance d > 0.
double gain_at(const ChannelModel& model, double distance_m);

/// Inverts the gain model: d = ((p_rx - p_tx) - intercept_b) / slope_a.
/// May return a nonpositive value for implausible power pairs; callers clamp.
double estimate_distance(const ChannelModel& model, double p_tx_dbm,
                         double p_rx_dbm);

/// Gain draw with additive zero-mean Gaussian noise of variance noise_var.
double sample_gain(const ChannelModel& model, double distance_m, Rng& rng);

/// Distance draw d_true + N(0, sigma_d^2), floored at kMinDistance.
double sample_distance(double d_true_m, double sigma_d_m, Rng& rng);

}  // namespace uwloc
