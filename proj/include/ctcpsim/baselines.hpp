#pragma once

#include <cmath>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ctcpsim/ctcp.hpp"
#include "ctcpsim/world.hpp"

namespace ctcpsim {

// Geographic Adaptive Fidelity: one awake node per virtual grid cell.
struct GafGrid {
  using Cell = std::pair<long, long>;

  double cell_size = 0.0;
  Seconds rotation_period = 5.0;
  std::map<Cell, std::vector<NodeId>> cells;  // ids ascending
  std::map<Cell, NodeId> leader;
};

// Largest cell side for which every point of a cell is in range of every
// point of the four edge-adjacent cells: range / sqrt(5).
inline double gaf_cell_size(double range) { return range / std::sqrt(5.0); }

GafGrid::Cell gaf_cell_of(Vec2 p, double cell_size);

// Participants (alive finite-energy nodes) only.
GafGrid gaf_assign_cells(std::span<const Node> nodes, double range, Seconds rotation_period = 5.0);

// Per cell the alive node with most residual energy leads (lower id on ties);
// the rest sleep. A lone node in its cell never sleeps.
void gaf_rotate_leaders(GafGrid& grid, std::span<Node> nodes);

// Cluster-based Energy Conservation: lifetime-elected heads, one
// longest-lived gateway per head pair, a fixed re-clustering period, and no
// strong/weak adaptation.
Clustering cec_cluster_round(const RadioGraph& graph, const Lifetimes& lifetimes, Seconds period,
                             Seconds now = 0.0);

// Runs a CEC round over the world's participants, applies roles and charges
// control energy.
Clustering run_cec_round(World& world, Seconds period, Seconds now);

}  // namespace ctcpsim
