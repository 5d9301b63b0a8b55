#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uwloc/errors.hpp"

namespace uwloc {

using NodeId = std::uint32_t;

struct Position {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle.
struct Box {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;
};

double pairwise_distance(Position p, Position q);
double squared_distance(Position p, Position q);

/// World description: ground-truth node positions, the anchor/unknown
/// partition and the two radii. Immutable once built.
struct Scenario {
  std::vector<Position> positions;        // indexed by NodeId, dense 0..N-1
  std::vector<std::uint8_t> anchor_mask;  // 1 where the node is an anchor
  double comm_radius = 0.0;
  double sense_radius = 0.0;

  std::size_t size() const { return positions.size(); }
  bool is_anchor(NodeId i) const { return anchor_mask[i] != 0; }
  std::vector<NodeId> anchor_ids() const;
  std::vector<NodeId> unknown_ids() const;
};

/// Grid of rows x cols nodes at (col*spacing, row*spacing), NodeIds assigned
/// row-major. Throws InvalidAnchor for anchor ids outside the grid.
Scenario build_grid(std::size_t rows, std::size_t cols, double spacing,
                    const std::vector<NodeId>& anchor_ids, double comm_radius,
                    double sense_radius);

/// Nodes j != i with ||p_i - p_j|| <= comm_radius, ascending id order.
std::vector<NodeId> neighbors(const Scenario& s, NodeId i);

/// Nodes with ||p_i - target|| <= sense_radius, ascending id order.
std::vector<NodeId> in_sensing_range(const Scenario& s, Position target);

/// Bounding box of the anchor positions, inflated by `inflate` on all sides.
Box anchor_bounding_box(const Scenario& s, double inflate);

/// The 27-node experiment network: 3 rows x 9 columns at 5 m spacing,
/// anchors on the four corners, 10 m comm radius, 8 m sensing radius.
Scenario reference_scenario();

}  // namespace uwloc
