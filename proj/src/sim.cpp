#include "uwloc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwloc::sim {

selfloc::Measurements generate_measurements(const Scenario& s, double sigma_d,
                                            std::uint64_t seed) {
  if (sigma_d < 0.0) throw std::invalid_argument("sigma_d must be nonnegative");
  selfloc::Measurements m;
  const std::uint64_t n = s.size();
  for (NodeId i = 0; i < s.size(); ++i) {
    for (NodeId j : neighbors(s, i)) {
      if (j <= i) continue;  // one draw per unordered edge
      const double d = pairwise_distance(s.positions[i], s.positions[j]);
      Rng rng = substream(seed, Stream::kMeasurement,
                          static_cast<std::uint64_t>(i) * n + j);
      m.set(i, j, sample_distance(d, sigma_d, rng));
    }
  }
  return m;
}

std::vector<LossCurve> run_selfloc_experiment(
    const Scenario& s, std::span<const double> loss_levels, int n_seeds,
    const selfloc::SelfLocConfig& base_cfg, double sigma_d) {
  if (n_seeds < 1) throw std::invalid_argument("need at least one seed");
  for (double p : loss_levels)
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("loss probability outside [0, 1]");

  const std::size_t rows = static_cast<std::size_t>(base_cfg.max_iters) + 1;
  std::vector<LossCurve> curves;
  curves.reserve(loss_levels.size());
  for (double level : loss_levels) {
    LossCurve curve;
    curve.loss_prob = level;
    curve.mean_mae.assign(rows, 0.0);
    // Seeds are shared across levels so curves differ only through the loss.
    for (int k = 0; k < n_seeds; ++k) {
      const std::uint64_t run_seed =
          derive_seed(base_cfg.seed, Stream::kExperiment,
                      static_cast<std::uint64_t>(k));
      selfloc::SelfLocConfig cfg = base_cfg;
      cfg.seed = run_seed;
      cfg.packet_loss_prob = level;
      const auto meas = generate_measurements(s, sigma_d, run_seed);
      const auto trace = selfloc::run(s, meas, cfg);
      for (std::size_t r = 0; r < rows; ++r) curve.mean_mae[r] += trace.mae[r];
    }
    for (double& v : curve.mean_mae) v /= static_cast<double>(n_seeds);
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<Position> make_trajectory(std::span<const Position> waypoints,
                                      double step_m) {
  if (waypoints.size() < 2)
    throw std::invalid_argument("trajectory needs at least two waypoints");
  if (!(step_m > 0.0)) throw std::invalid_argument("step must be positive");

  struct Segment {
    Position a, b;
    double length;
  };
  std::vector<Segment> segs;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < waypoints.size(); ++k) {
    const double len = pairwise_distance(waypoints[k], waypoints[k + 1]);
    if (len <= 1e-12) continue;  // repeated waypoint, skip
    segs.push_back({waypoints[k], waypoints[k + 1], len});
    total += len;
  }
  if (segs.empty()) return {waypoints[0]};

  const auto at_arclength = [&](double t) -> Position {
    double acc = 0.0;
    for (const Segment& seg : segs) {
      if (t <= acc + seg.length) {
        const double u = (t - acc) / seg.length;
        return {seg.a.x + u * (seg.b.x - seg.a.x),
                seg.a.y + u * (seg.b.y - seg.a.y)};
      }
      acc += seg.length;
    }
    return segs.back().b;
  };

  const long n_steps = static_cast<long>(std::floor(total / step_m + 1e-9));
  std::vector<Position> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 2);
  for (long k = 0; k <= n_steps; ++k)
    out.push_back(at_arclength(static_cast<double>(k) * step_m));
  if (total - static_cast<double>(n_steps) * step_m > 1e-9 * std::max(1.0, total))
    out.push_back(segs.back().b);  // include the far endpoint
  return out;
}

TrackingRun run_tracking(const Scenario& s,
                         std::span<const Position> trajectory,
                         const TrackingConfig& cfg) {
  if (cfg.sigma_d < 0.0) throw std::invalid_argument("sigma_d must be nonnegative");
  TrackingRun out;
  out.samples.reserve(trajectory.size());
  const std::uint64_t n = s.size();
  double err_sum = 0.0;

  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    TrackingSample smp;
    smp.truth = trajectory[k];
    const std::vector<NodeId> ids = in_sensing_range(s, smp.truth);
    smp.n_inrange = static_cast<int>(ids.size());

    if (ids.size() >= 3) {
      srls::SrlsInput input;
      input.anchors.reserve(ids.size());
      input.ranges.reserve(ids.size());
      for (NodeId id : ids) {
        const double d_true = std::max(
            pairwise_distance(s.positions[id], smp.truth), kMinDistance);
        Rng rng = substream(cfg.seed, Stream::kTracking,
                            static_cast<std::uint64_t>(k) * n + id);
        double range;
        if (cfg.mode == RangingMode::kDistanceNoise) {
          range = sample_distance(d_true, cfg.sigma_d, rng);
        } else {
          const double p_rx =
              cfg.tx_power_dbm + sample_gain(cfg.channel, d_true, rng);
          range = std::max(estimate_distance(cfg.channel, cfg.tx_power_dbm, p_rx),
                           kMinDistance);
        }
        input.anchors.push_back(s.positions[id]);
        input.ranges.push_back(range);
      }
      try {
        smp.estimate = srls::solve(input).position;
      } catch (const RankDeficient&) {
        smp.flagged = true;  // collinear in-range nodes
      } catch (const NearSingular&) {
        smp.flagged = true;
      } catch (const NoBracket&) {
        smp.flagged = true;
      }
    } else {
      smp.flagged = true;
    }

    if (smp.estimate) {
      err_sum += pairwise_distance(*smp.estimate, smp.truth);
      ++out.n_solved;
    } else {
      ++out.n_flagged;
    }
    out.samples.push_back(std::move(smp));
  }

  if (out.n_solved > 0) out.mae = err_sum / static_cast<double>(out.n_solved);
  return out;
}

TrackingRun run_tracking(const Scenario& s,
                         std::span<const Position> trajectory, double sigma_d,
                         std::uint64_t seed) {
  TrackingConfig cfg;
  cfg.sigma_d = sigma_d;
  cfg.seed = seed;
  return run_tracking(s, trajectory, cfg);
}

std::vector<Position> reference_trajectory(const Scenario& s, double step_m) {
  // Serpentine sweep along the two row midlines of the node bounding box.
  Box b{s.positions[0].x, s.positions[0].y, s.positions[0].x, s.positions[0].y};
  for (const Position& p : s.positions) {
    b.xmin = std::min(b.xmin, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.xmax = std::max(b.xmax, p.x);
    b.ymax = std::max(b.ymax, p.y);
  }
  const double y_lo = b.ymin + 0.25 * (b.ymax - b.ymin);
  const double y_hi = b.ymin + 0.75 * (b.ymax - b.ymin);
  const std::vector<Position> waypoints = {
      {b.xmin, y_lo}, {b.xmax, y_lo}, {b.xmax, y_hi}, {b.xmin, y_hi}};
  return make_trajectory(waypoints, step_m);
}

}  // namespace uwloc::sim
