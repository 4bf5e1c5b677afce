#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "g2vd/field.hpp"
#include "g2vd/gvd.hpp"
#include "g2vd/primitives.hpp"

namespace g2vd {

struct LatticeState {
  int ix = 0;
  int iy = 0;
  int ih = 0;

  CellIndex cell() const { return {ix, iy}; }
  friend auto operator<=>(const LatticeState&, const LatticeState&) = default;
};

struct SpeedLimits {
  double v_max = 1.0;
  double omega_max = 1.0;
};

/// Corridor-restricted 2-D cost-to-goal in seconds; +inf outside the corridor.
struct HeuristicMap {
  int width = 0;
  int height = 0;
  CellIndex goal;
  std::vector<double> h;

  double at(CellIndex c) const { return h[c.iy * width + c.ix]; }
};

/// Primitive applied at a lattice state: index into PrimitiveSet::primitives.
struct PlannedStep {
  LatticeState from;
  std::size_t primitive = 0;
};

struct SearchResult {
  std::vector<Pose> path;
  std::vector<PlannedStep> steps;
  LatticeState start;
  LatticeState goal;
  double cost = 0.0;
  std::size_t expansions = 0;
  std::size_t graph_size = 0;
  double wall_time = 0.0;
  /// Every expanded state's cell, in expansion order (for visualization).
  std::vector<CellIndex> expanded_cells;
};

/// Travel time under uniform motion: max(length / v_max, |dtheta| / omega_max).
double primitive_time(const MotionPrimitive& prim, const SpeedLimits& limits);

/// t * (max rho over the translated swath + 1), or nullopt when the swath
/// touches an obstacle, leaves the map or leaves the corridor.
std::optional<double> primitive_cost(const MotionPrimitive& prim, const LatticeState& at,
                                     const VoronoiField& field, const GvdMap& gvd,
                                     const SpeedLimits& limits);

/// Dijkstra from `goal` over corridor cells, 8-connected; the step into a
/// cell costs (step length / v_max) * (rho(cell) + 1).
HeuristicMap build_h2d(const VoronoiField& field, CellIndex goal, const SpeedLimits& limits);

struct PlanOptions {
  /// Search radius (meters) when snapping start/goal into the corridor;
  /// <= 0 selects 2 * r_c.
  double snap_radius = 0.0;
  bool record_expanded = false;
};

/// A* over (x, y, heading) restricted to the field's corridor. Throws
/// PlanningError (carrying the expansion count) when the open list empties.
SearchResult plan(const Pose& start, const Pose& goal, const GvdMap& gvd, const VoronoiField& field,
                  const PrimitiveSet& prims, const SpeedLimits& limits, const PlanOptions& options = {});

/// Nearest corridor cell to a world position within `radius` meters.
CellIndex snap_to_corridor(const GvdMap& gvd, const VoronoiField& field, const Eigen::Vector2d& p,
                           double radius);

/// Metrics row with header `expansions,time_s,graph_size,path_cost`.
void write_search_metrics_csv(const SearchResult& result, std::ostream& out, bool header = true);
/// One `x y theta` line per pose.
void write_pose_list(const std::vector<Pose>& poses, std::ostream& out);

class NoPathError : public PlanningError {
 public:
  NoPathError(const std::string& what, std::size_t expansions)
      : PlanningError(what), expansions_(expansions) {}
  std::size_t expansions() const { return expansions_; }

 private:
  std::size_t expansions_;
};

}  // namespace g2vd
