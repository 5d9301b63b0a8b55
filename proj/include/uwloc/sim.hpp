#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uwloc/channel_model.hpp"
#include "uwloc/selfloc.hpp"
#include "uwloc/srls.hpp"

namespace uwloc::sim {

/// One noisy symmetric range draw per unordered neighbor edge. Each edge uses
/// its own (seed, edge) substream, so measurements are order-independent.
selfloc::Measurements generate_measurements(const Scenario& s, double sigma_d,
                                            std::uint64_t seed);

/// Per-loss-level MAE curve averaged over seeds.
struct LossCurve {
  double loss_prob = 0.0;
  std::vector<double> mean_mae;  // indexed by iteration, 0..max_iters
};

/// Convergence study: for every loss level, runs the self-positioning
/// algorithm over n_seeds derived seeds (shared across levels, so curves
/// differ only through the loss threshold) and averages MAE per iteration.
std::vector<LossCurve> run_selfloc_experiment(
    const Scenario& s, std::span<const double> loss_levels, int n_seeds,
    const selfloc::SelfLocConfig& base_cfg, double sigma_d);

/// Piecewise-linear interpolation of the waypoint path sampled every `step_m`
/// meters of arc length; both endpoints included, zero-length segments skipped.
std::vector<Position> make_trajectory(std::span<const Position> waypoints,
                                      double step_m);

enum class RangingMode {
  kDistanceNoise,  // ranges drawn as d + N(0, sigma_d^2)
  kPowerNoise,     // received power drawn from the channel model, then inverted
};

struct TrackingConfig {
  double sigma_d = kDefaultSigmaD;
  RangingMode mode = RangingMode::kDistanceNoise;
  ChannelModel channel{};
  double tx_power_dbm = kDefaultTxPowerDbm;
  std::uint64_t seed = 0;
};

struct TrackingSample {
  Position truth;
  std::optional<Position> estimate;  // absent when flagged
  int n_inrange = 0;
  bool flagged = false;
};

struct TrackingRun {
  std::vector<TrackingSample> samples;
  std::optional<double> mae;  // over solved samples; absent if none solved
  std::size_t n_solved = 0;
  std::size_t n_flagged = 0;
};

/// Target tracking along a trajectory: per sample, draws noisy ranges to the
/// nodes within sensing range and solves the squared-range problem when at
/// least three non-collinear nodes are in range; otherwise flags the sample.
TrackingRun run_tracking(const Scenario& s,
                         std::span<const Position> trajectory,
                         const TrackingConfig& cfg);
TrackingRun run_tracking(const Scenario& s,
                         std::span<const Position> trajectory, double sigma_d,
                         std::uint64_t seed);

/// Serpentine path through the grid interior (waypoints on the row midlines),
/// sampled every step_m meters.
std::vector<Position> reference_trajectory(const Scenario& s,
                                           double step_m = 0.5);

}  // namespace uwloc::sim
