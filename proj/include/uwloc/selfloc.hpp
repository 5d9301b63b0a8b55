#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "uwloc/network.hpp"
#include "uwloc/rng.hpp"

namespace uwloc::selfloc {

/// Symmetric range measurements, one value per unordered neighbor pair.
class Measurements {
 public:
  void set(NodeId i, NodeId j, double range_m);
  /// Throws MissingMeasurement when the pair has no value.
  double at(NodeId i, NodeId j) const;
  bool contains(NodeId i, NodeId j) const;
  std::size_t edge_count() const { return edges_.size(); }

 private:
  static std::uint64_t key(NodeId i, NodeId j);
  std::unordered_map<std::uint64_t, double> edges_;
};

struct SelfLocConfig {
  int max_iters = 50;
  double inner_tol = 1e-9;       // gradient-norm stop for the local solver
  int inner_max_iters = 50;
  double packet_loss_prob = 0.0; // per-node, per-round broadcast loss
  double proximal_tau = 0.0;     // optional proximal coefficient
  std::optional<Box> init_box;   // default: anchor bbox inflated by comm radius
  std::uint64_t seed = 0;
};

/// Distributed algorithm state after some number of synchronous rounds.
struct SelfLocState {
  std::vector<Position> estimates;  // all nodes; anchor entries never change
  std::vector<std::unordered_map<NodeId, Position>> last_known;
  int iteration = 0;
};

/// Per-iteration record of one run. Row 0 is the initialization.
struct ExperimentTrace {
  std::vector<std::vector<Position>> snapshots;  // [iteration][node]
  std::vector<double> mae;                       // unknowns only, meters
  std::vector<double> objective;                 // data misfit of the estimates
  SelfLocConfig config;
};

/// Data misfit sum_{i unknown} sum_{j in N^i} (d_ij^2 - ||x_i - x_j||^2)^2.
/// Unknown-unknown edges contribute from both endpoints.
double objective_value(const std::vector<Position>& estimates,
                       const Measurements& m, const Scenario& s);

/// Convex majorizer of the misfit built around `pivot`:
/// sum d^4 + ||x_i - x_j||^4 - 4 d^2 (pivot_i - pivot_j)^T x_i.
double surrogate_value(const std::vector<Position>& x,
                       const std::vector<Position>& pivot,
                       const Measurements& m, const Scenario& s);

/// Minimizes the node-local surrogate
///   f(x) = sum_j ||x - x_j||^4 - 4 d_j^2 (pivot - x_j)^T x
///        + (tau/2) ||x - pivot||^2
/// over x in R^2 by damped Newton with Armijo backtracking. `neighbor_positions`
/// holds the values the node treats as fixed; `ranges` the matching d_j.
Position local_subproblem_solve(Position pivot,
                                std::span<const Position> neighbor_positions,
                                std::span<const double> ranges,
                                const SelfLocConfig& cfg);

/// Seeded initial state: anchors at truth, unknowns uniform in the init box,
/// every neighbor's initial value delivered once (round-0 handshake).
SelfLocState init_state(const Scenario& s, const SelfLocConfig& cfg);

/// One synchronous round: every unknown node solves its local subproblem
/// against round-start last-known values, then every node broadcasts its new
/// value; a broadcast is dropped for all neighbors at once with probability
/// packet_loss_prob. Loss draws come from the (round, node) substream of
/// cfg.seed, so results do not depend on execution order.
SelfLocState run_round(const SelfLocState& state, const Scenario& s,
                       const Measurements& m, const SelfLocConfig& cfg);

/// Full run: init plus cfg.max_iters rounds, recording estimates, MAE and
/// misfit per iteration.
ExperimentTrace run(const Scenario& s, const Measurements& m,
                    const SelfLocConfig& cfg);

/// (1/|ids|) sum ||estimate_i - truth_i|| over the given nodes.
double mean_absolute_error(const std::vector<Position>& estimates,
                           const std::vector<Position>& truth,
                           const std::vector<NodeId>& ids);

}  // namespace uwloc::selfloc
