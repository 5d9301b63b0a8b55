#include "uwloc/selfloc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uwloc::selfloc {

namespace {

inline Position sub(Position a, Position b) { return {a.x - b.x, a.y - b.y}; }
inline double dot(Position a, Position b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Position a) { return a.x * a.x + a.y * a.y; }

std::vector<std::vector<NodeId>> adjacency(const Scenario& s) {
  std::vector<std::vector<NodeId>> adj(s.size());
  for (NodeId i = 0; i < s.size(); ++i) adj[i] = neighbors(s, i);
  return adj;
}

// Local surrogate value; the constant d^4 terms are dropped.
double local_value(Position x, Position pivot,
                   std::span<const Position> nbr, std::span<const double> rng,
                   double tau) {
  double v = 0.0;
  for (std::size_t k = 0; k < nbr.size(); ++k) {
    const Position diff = sub(x, nbr[k]);
    const double r2 = norm2(diff);
    v += r2 * r2 - 4.0 * rng[k] * rng[k] * dot(sub(pivot, nbr[k]), x);
  }
  return v + 0.5 * tau * norm2(sub(x, pivot));
}

}  // namespace

std::uint64_t Measurements::key(NodeId i, NodeId j) {
  const NodeId lo = std::min(i, j);
  const NodeId hi = std::max(i, j);
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

void Measurements::set(NodeId i, NodeId j, double range_m) {
  if (i == j) throw std::invalid_argument("no self-edges in measurements");
  if (!(range_m > 0.0))
    throw std::invalid_argument("measured range must be positive");
  edges_[key(i, j)] = range_m;
}

double Measurements::at(NodeId i, NodeId j) const {
  const auto it = edges_.find(key(i, j));
  if (it == edges_.end())
    throw MissingMeasurement("no measurement for edge (" + std::to_string(i) +
                             ", " + std::to_string(j) + ")");
  return it->second;
}

bool Measurements::contains(NodeId i, NodeId j) const {
  return edges_.find(key(i, j)) != edges_.end();
}

double objective_value(const std::vector<Position>& estimates,
                       const Measurements& m, const Scenario& s) {
  if (estimates.size() != s.size())
    throw std::invalid_argument("estimate vector size mismatch");
  double total = 0.0;
  for (NodeId i = 0; i < s.size(); ++i) {
    if (s.is_anchor(i)) continue;
    for (NodeId j : neighbors(s, i)) {
      const double d = m.at(i, j);
      const double t = d * d - squared_distance(estimates[i], estimates[j]);
      total += t * t;
    }
  }
  return total;
}

double surrogate_value(const std::vector<Position>& x,
                       const std::vector<Position>& pivot,
                       const Measurements& m, const Scenario& s) {
  if (x.size() != s.size() || pivot.size() != s.size())
    throw std::invalid_argument("position vector size mismatch");
  double total = 0.0;
  for (NodeId i = 0; i < s.size(); ++i) {
    if (s.is_anchor(i)) continue;
    for (NodeId j : neighbors(s, i)) {
      const double d = m.at(i, j);
      const double d2 = d * d;
      const double r2 = squared_distance(x[i], x[j]);
      total += d2 * d2 + r2 * r2 - 4.0 * d2 * dot(sub(pivot[i], pivot[j]), x[i]);
    }
  }
  return total;
}

Position local_subproblem_solve(Position pivot,
                                std::span<const Position> neighbor_positions,
                                std::span<const double> ranges,
                                const SelfLocConfig& cfg) {
  if (neighbor_positions.empty())
    throw NoNeighbors("local subproblem needs at least one neighbor");
  if (neighbor_positions.size() != ranges.size())
    throw std::invalid_argument("neighbor/range size mismatch");
  const double tau = cfg.proximal_tau;

  Position x = pivot;
  double fx = local_value(x, pivot, neighbor_positions, ranges, tau);

  for (int iter = 0; iter < cfg.inner_max_iters; ++iter) {
    // Gradient and Hessian of the convex local surrogate.
    double gx = 0.0, gy = 0.0;
    double h00 = tau, h01 = 0.0, h11 = tau;
    for (std::size_t k = 0; k < neighbor_positions.size(); ++k) {
      const Position diff = sub(x, neighbor_positions[k]);
      const double r2 = norm2(diff);
      const double d2 = ranges[k] * ranges[k];
      const Position lin = sub(pivot, neighbor_positions[k]);
      gx += 4.0 * r2 * diff.x - 4.0 * d2 * lin.x;
      gy += 4.0 * r2 * diff.y - 4.0 * d2 * lin.y;
      h00 += 4.0 * r2 + 8.0 * diff.x * diff.x;
      h01 += 8.0 * diff.x * diff.y;
      h11 += 4.0 * r2 + 8.0 * diff.y * diff.y;
    }
    gx += tau * (x.x - pivot.x);
    gy += tau * (x.y - pivot.y);

    const double gnorm = std::hypot(gx, gy);
    if (gnorm <= cfg.inner_tol) break;

    // Newton direction, with a ridge when the Hessian is near singular.
    double px = 0.0, py = 0.0;
    double ridge = 0.0;
    for (;;) {
      const double a00 = h00 + ridge;
      const double a11 = h11 + ridge;
      const double det = a00 * a11 - h01 * h01;
      if (det > 1e-12 * (1.0 + a00 + a11) && a00 > 0.0) {
        px = (a11 * gx - h01 * gy) / det;
        py = (a00 * gy - h01 * gx) / det;
        break;
      }
      ridge = (ridge == 0.0) ? 1e-8 * (1.0 + h00 + h11) : ridge * 10.0;
    }
    double descent = gx * px + gy * py;
    if (!(descent > 0.0)) {
      // Fall back to a scaled gradient step.
      const double scale = 1.0 / (1.0 + h00 + h11);
      px = gx * scale;
      py = gy * scale;
      descent = gx * px + gy * py;
    }

    // Armijo backtracking.
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= 30; ++bt) {
      const Position cand{x.x - t * px, x.y - t * py};
      const double fc = local_value(cand, pivot, neighbor_positions, ranges, tau);
      if (fc <= fx - 1e-4 * t * descent) {
        x = cand;
        fx = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return x;
}

SelfLocState init_state(const Scenario& s, const SelfLocConfig& cfg) {
  if (s.anchor_ids().empty())
    throw InvalidAnchor("self-positioning needs at least one anchor");
  const Box box = cfg.init_box ? *cfg.init_box
                               : anchor_bounding_box(s, s.comm_radius);

  SelfLocState st;
  st.estimates.resize(s.size());
  st.last_known.resize(s.size());
  st.iteration = 0;
  for (NodeId i = 0; i < s.size(); ++i) {
    if (s.is_anchor(i)) {
      st.estimates[i] = s.positions[i];
    } else {
      Rng rng = substream(cfg.seed, Stream::kInit, i);
      st.estimates[i] = {rng.uniform(box.xmin, box.xmax),
                         rng.uniform(box.ymin, box.ymax)};
    }
  }
  // Round-0 handshake: every neighbor's starting value is delivered once;
  // only the iterative exchanges below are subject to loss.
  for (NodeId i = 0; i < s.size(); ++i)
    for (NodeId j : neighbors(s, i)) st.last_known[i][j] = st.estimates[j];
  return st;
}

SelfLocState run_round(const SelfLocState& state, const Scenario& s,
                       const Measurements& m, const SelfLocConfig& cfg) {
  const auto adj = adjacency(s);
  SelfLocState next = state;

  // Jacobi step: all unknowns solve against round-start last-known values.
  std::vector<Position> nbr_pos;
  std::vector<double> nbr_rng;
  for (NodeId i = 0; i < s.size(); ++i) {
    if (s.is_anchor(i)) continue;
    const auto& nbrs = adj[i];
    if (nbrs.empty())
      throw NoNeighbors("node " + std::to_string(i) + " has no neighbors");
    nbr_pos.clear();
    nbr_rng.clear();
    for (NodeId j : nbrs) {
      nbr_pos.push_back(state.last_known[i].at(j));
      nbr_rng.push_back(m.at(i, j));
    }
    next.estimates[i] =
        local_subproblem_solve(state.estimates[i], nbr_pos, nbr_rng, cfg);
  }

  // Broadcast step: one loss draw per node covers all its neighbors at once.
  const std::uint64_t round = static_cast<std::uint64_t>(state.iteration);
  for (NodeId v = 0; v < s.size(); ++v) {
    Rng rng = substream(cfg.seed, Stream::kLoss, round * s.size() + v);
    if (rng.uniform01() < cfg.packet_loss_prob) continue;  // dropped
    for (NodeId j : adj[v]) next.last_known[j][v] = next.estimates[v];
  }

  next.iteration = state.iteration + 1;
  return next;
}

ExperimentTrace run(const Scenario& s, const Measurements& m,
                    const SelfLocConfig& cfg) {
  if (cfg.max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  const std::vector<NodeId> unknowns = s.unknown_ids();

  ExperimentTrace trace;
  trace.config = cfg;
  auto record = [&](const SelfLocState& st) {
    trace.snapshots.push_back(st.estimates);
    trace.mae.push_back(mean_absolute_error(st.estimates, s.positions, unknowns));
    trace.objective.push_back(objective_value(st.estimates, m, s));
  };

  SelfLocState st = init_state(s, cfg);
  record(st);
  for (int k = 0; k < cfg.max_iters; ++k) {
    st = run_round(st, s, m, cfg);
    record(st);
  }
  return trace;
}

double mean_absolute_error(const std::vector<Position>& estimates,
                           const std::vector<Position>& truth,
                           const std::vector<NodeId>& ids) {
  if (estimates.size() != truth.size())
    throw std::invalid_argument("estimate/truth size mismatch");
  if (ids.empty()) return 0.0;
  double sum = 0.0;
  for (NodeId i : ids) sum += pairwise_distance(estimates[i], truth[i]);
  return sum / static_cast<double>(ids.size());
}

}  // namespace uwloc::selfloc
