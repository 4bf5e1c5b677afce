#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "g2vd/grid_map.hpp"

namespace g2vd {

/// Squared distance of cells that have no obstacle anywhere on the map.
inline constexpr std::int32_t kInfiniteSqDist = std::numeric_limits<std::int32_t>::max();

struct MapDelta;

/// Grid-based generalized Voronoi diagram.
///
/// Per cell it stores the exact squared Euclidean distance (cell^2 units) to
/// the nearest obstacle cell, the canonical nearest obstacle (smallest linear
/// index among all obstacles at that distance) and the Voronoi edge flag.
/// Obstacles are the cells that are not traversable under `policy()`.
class GvdMap {
 public:
  GvdMap() = default;

  const OccupancyGrid& grid() const { return grid_; }
  UnknownPolicy policy() const { return policy_; }
  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  double resolution() const { return grid_.resolution(); }
  std::size_t size() const { return sq_dist_.size(); }

  bool is_obstacle(int index) const { return !is_traversable(grid_, grid_.cell(index), policy_); }
  bool is_obstacle(CellIndex c) const { return is_obstacle(grid_.index(c)); }

  std::int32_t sq_dist(int index) const { return sq_dist_[index]; }
  std::int32_t sq_dist(CellIndex c) const { return sq_dist_[grid_.index(c)]; }

  /// Linear index of the canonical nearest obstacle, or -1 on an obstacle-free map.
  int nearest_index(int index) const { return nearest_[index]; }
  std::optional<CellIndex> nearest_obstacle(CellIndex c) const {
    int n = nearest_[grid_.index(c)];
    if (n < 0) return std::nullopt;
    return grid_.cell(n);
  }

  bool is_voronoi(int index) const { return voronoi_[index] != 0; }
  bool is_voronoi(CellIndex c) const { return voronoi_[grid_.index(c)] != 0; }

  std::size_t voronoi_count() const;

  friend bool operator==(const GvdMap&, const GvdMap&) = default;

 private:
  friend GvdMap build_gvd(const OccupancyGrid&, UnknownPolicy);
  friend void apply_delta(GvdMap&, const MapDelta&);

  OccupancyGrid grid_;
  UnknownPolicy policy_ = UnknownPolicy::Obstacle;
  std::vector<std::int32_t> sq_dist_;
  std::vector<int> nearest_;
  std::vector<std::uint8_t> voronoi_;
};

/// A batch of occupancy changes. The two lists must be disjoint.
struct MapDelta {
  std::vector<CellIndex> newly_occupied;
  std::vector<CellIndex> newly_freed;
};

GvdMap build_gvd(const OccupancyGrid& grid, UnknownPolicy policy = UnknownPolicy::Obstacle);

/// Applies `delta` in place, repairing only the cells whose nearest obstacle
/// can change. The result is cell-identical to build_gvd on the mutated grid.
/// Throws RangeError (map untouched) if a delta cell is out of bounds.
void apply_delta(GvdMap& gvd, const MapDelta& delta);

inline GvdMap update_gvd(GvdMap gvd, const MapDelta& delta) {
  apply_delta(gvd, delta);
  return gvd;
}

/// All obstacle cells (linear indices, ascending) at exactly sq_dist from `index`.
std::vector<int> nearest_obstacle_set(const GvdMap& gvd, int index);

/// Distance to the nearest obstacle in meters; +inf on an obstacle-free map.
double clearance_at(const GvdMap& gvd, CellIndex c);

/// True when the cell's clearance is at least `radius` meters.
bool has_clearance(const GvdMap& gvd, int index, double radius);

/// CSV dump with header `ix,iy,sq_dist,is_voronoi`.
void write_gvd_csv(const GvdMap& gvd, std::ostream& out);

}  // namespace g2vd
