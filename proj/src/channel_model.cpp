#include "uwloc/channel_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uwloc {

namespace {

void check_samples(std::span<const GainSample> samples) {
  for (std::size_t k = 0; k < samples.size(); ++k)
    if (!(samples[k].distance_m > 0.0))
      throw InvalidDistance("sample " + std::to_string(k) +
                            " has nonpositive distance");
}

}  // namespace

ChannelModel fit_linear_model(std::span<const GainSample> samples) {
  if (samples.size() < 2)
    throw DegenerateFit("need at least two samples to fit a line");
  check_samples(samples);

  // Normal equations of min ||A [a b]^T - g||^2 with rows (d_k, 1).
  double s_dd = 0.0, s_d = 0.0, s_dg = 0.0, s_g = 0.0;
  const double n = static_cast<double>(samples.size());
  for (const GainSample& s : samples) {
    s_dd += s.distance_m * s.distance_m;
    s_d += s.distance_m;
    s_dg += s.distance_m * s.gain_db;
    s_g += s.gain_db;
  }
  const double det = n * s_dd - s_d * s_d;  // n^2 * var(d)
  if (det <= 1e-12 * std::max(1.0, n * s_dd))
    throw DegenerateFit("all sample distances coincide");

  ChannelModel model;
  model.slope_a = (n * s_dg - s_d * s_g) / det;
  model.intercept_b = (s_dd * s_g - s_d * s_dg) / det;
  model.noise_var = estimate_noise_variance(samples, model);
  return model;
}

double estimate_noise_variance(std::span<const GainSample> samples,
                               const ChannelModel& model) {
  if (samples.empty())
    throw std::invalid_argument("variance estimate needs at least one sample");
  double ss = 0.0;
  for (const GainSample& s : samples) {
    const double r = model.slope_a * s.distance_m + model.intercept_b - s.gain_db;
    ss += r * r;
  }
  return ss / static_cast<double>(samples.size());
}

double gain_at(const ChannelModel& model, double distance_m) {
  if (!(distance_m > 0.0))
    throw InvalidDistance("distance must be positive, got " +
                          std::to_string(distance_m));
  return model.slope_a * distance_m + model.intercept_b;
}

double estimate_distance(const ChannelModel& model, double p_tx_dbm,
                         double p_rx_dbm) {
  if (model.slope_a == 0.0)
    throw std::invalid_argument("cannot invert a zero-slope channel model");
  const double gain = p_rx_dbm - p_tx_dbm;
  return (gain - model.intercept_b) / model.slope_a;
}

double sample_gain(const ChannelModel& model, double distance_m, Rng& rng) {
  if (model.noise_var < 0.0)
    throw std::invalid_argument("noise variance must be nonnegative");
  return gain_at(model, distance_m) + rng.normal(0.0, std::sqrt(model.noise_var));
}

double sample_distance(double d_true_m, double sigma_d_m, Rng& rng) {
  if (!(d_true_m > 0.0))
    throw InvalidDistance("true distance must be positive");
  if (sigma_d_m < 0.0)
    throw std::invalid_argument("sigma_d must be nonnegative");
  return std::max(d_true_m + rng.normal(0.0, sigma_d_m), kMinDistance);
}

}  // namespace uwloc
