#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mcroi/geometry.hpp"
#include "mcroi/trace.hpp"

namespace mcroi {

// One object at one timestamp: cover at least one alternative entirely.
struct ObjectDemand {
  int frame_index = 0;
  int64_t object_id = 0;
  int dup_index = 0;
  std::vector<std::vector<TileRef>> alternatives;  // each sorted ascending
};

struct CoverInstance {
  std::vector<TileRef> universe;  // all tiles of all cameras
  std::vector<ObjectDemand> demands;
};

enum class SolveStatus { Optimal, FeasibleGreedy, TimeLimited };

struct Solution {
  std::map<int, RoiMask> masks;  // camera_id -> mask (every camera present)
  int objective = 0;             // total selected tiles across cameras
  SolveStatus status = SolveStatus::Optimal;
  int64_t nodes_explored = 0;
};

// Build the minimal-mask optimization instance from an association table.
// Identical demands are deduplicated; alternatives that are supersets of a
// sibling alternative are pruned.
CoverInstance build_cover_instance(const AssociationTable& table,
                                   const std::map<int, TileGrid>& grids);

// Exact branch-and-bound over per-demand alternative choices. Within the
// time budget the result is the global minimum; past it, the best incumbent
// is returned with status TimeLimited. Ties between equal-size optima are
// broken lexicographically by (camera_id, tile_index) over the selected set.
Solution solve_exact(const CoverInstance& instance, double time_budget_s = 60.0);

// Scalable fallback: repeatedly commits the cheapest marginal alternative of
// the unsatisfied demand with the smallest such cost.
Solution solve_greedy(const CoverInstance& instance);

// Every demand with no alternative fully contained in the masks.
std::vector<ObjectDemand> verify_cover(const CoverInstance& instance,
                                       const std::map<int, RoiMask>& masks);

}  // namespace mcroi
