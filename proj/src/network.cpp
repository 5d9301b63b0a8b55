#include "uwloc/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace uwloc {

double squared_distance(Position p, Position q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy;
}

double pairwise_distance(Position p, Position q) {
  return std::hypot(p.x - q.x, p.y - q.y);
}

std::vector<NodeId> Scenario::anchor_ids() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < size(); ++i)
    if (is_anchor(i)) out.push_back(i);
  return out;
}

std::vector<NodeId> Scenario::unknown_ids() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < size(); ++i)
    if (!is_anchor(i)) out.push_back(i);
  return out;
}

Scenario build_grid(std::size_t rows, std::size_t cols, double spacing,
                    const std::vector<NodeId>& anchor_ids, double comm_radius,
                    double sense_radius) {
  if (rows * cols < 1) throw std::invalid_argument("grid needs at least one node");
  if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  if (!(comm_radius > 0.0) || !(sense_radius > 0.0))
    throw std::invalid_argument("radii must be positive");

  const std::size_t n = rows * cols;
  Scenario s;
  s.positions.resize(n);
  s.anchor_mask.assign(n, 0);
  s.comm_radius = comm_radius;
  s.sense_radius = sense_radius;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      s.positions[r * cols + c] = {static_cast<double>(c) * spacing,
                                   static_cast<double>(r) * spacing};
  for (NodeId a : anchor_ids) {
    if (a >= n)
      throw InvalidAnchor("anchor id " + std::to_string(a) +
                          " outside grid of " + std::to_string(n) + " nodes");
    s.anchor_mask[a] = 1;
  }
  return s;
}

std::vector<NodeId> neighbors(const Scenario& s, NodeId i) {
  if (i >= s.size())
    throw UnknownNode("node id " + std::to_string(i) + " not in scenario");
  std::vector<NodeId> out;
  const double r2 = s.comm_radius * s.comm_radius;
  for (NodeId j = 0; j < s.size(); ++j) {
    if (j == i) continue;
    if (squared_distance(s.positions[i], s.positions[j]) <= r2)
      out.push_back(j);
  }
  return out;
}

std::vector<NodeId> in_sensing_range(const Scenario& s, Position target) {
  std::vector<NodeId> out;
  const double r2 = s.sense_radius * s.sense_radius;
  for (NodeId j = 0; j < s.size(); ++j)
    if (squared_distance(s.positions[j], target) <= r2) out.push_back(j);
  return out;
}

Box anchor_bounding_box(const Scenario& s, double inflate) {
  Box b{std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (NodeId i = 0; i < s.size(); ++i) {
    if (!s.is_anchor(i)) continue;
    any = true;
    b.xmin = std::min(b.xmin, s.positions[i].x);
    b.ymin = std::min(b.ymin, s.positions[i].y);
    b.xmax = std::max(b.xmax, s.positions[i].x);
    b.ymax = std::max(b.ymax, s.positions[i].y);
  }
  if (!any) throw InvalidAnchor("scenario has no anchors");
  b.xmin -= inflate;
  b.ymin -= inflate;
  b.xmax += inflate;
  b.ymax += inflate;
  return b;
}

Scenario reference_scenario() {
  // 27 nodes, |anchors| = 4 on the corners, 23 unknown.
  return build_grid(3, 9, 5.0, {0, 8, 18, 26}, 10.0, 8.0);
}

}  // namespace uwloc
