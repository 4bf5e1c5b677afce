#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "g2vd/gvd.hpp"

namespace g2vd {

/// Shortest Voronoi grid path C_start -> C1 -> C2 -> C_goal. The L1 segment is
/// cells[0..c1], L3 is cells[c1..c2] (all Voronoi cells), L2 is cells[c2..end].
struct VoronoiPath {
  std::vector<CellIndex> cells;
  std::size_t c1 = 0;
  std::size_t c2 = 0;
};

/// Restricted search region: free cells covered by the per-cell clearance
/// boxes of a VoronoiPath.
struct VoronoiCorridor {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;
  VoronoiPath source;

  bool contains(CellIndex c) const {
    return c.ix >= 0 && c.iy >= 0 && c.ix < width && c.iy < height && mask[c.iy * width + c.ix] != 0;
  }
  bool contains(int index) const { return mask[index] != 0; }
  std::size_t count() const;
};

struct GridPathResult {
  CellIndex cell;
  std::vector<CellIndex> path;
};

/// Breadth-first search (8-connected) from `c` through cells with clearance
/// >= r_c to the closest Voronoi cell with clearance >= r_c. Returns that
/// cell and the path from `c` to it.
GridPathResult nearest_gvd_cell(const GvdMap& gvd, CellIndex c, double r_c);

/// A* along Voronoi cells with clearance >= r_c, 8-connected with unit/sqrt(2)
/// steps and an octile heuristic.
std::vector<CellIndex> voronoi_astar(const GvdMap& gvd, CellIndex c1, CellIndex c2, double r_c);

/// Length of an 8-connected cell path in cell units.
double grid_path_cost(const std::vector<CellIndex>& cells);

VoronoiPath find_voronoi_path(const GvdMap& gvd, CellIndex start, CellIndex goal, double r_c);

/// Box half-side for path cell C_k is round(d_k / resolution) cells, plus
/// `inflation` meters.
VoronoiCorridor build_corridor(const GvdMap& gvd, const VoronoiPath& path, double inflation = 0.0);

/// Every traversable cell; the search region of the unrestricted baseline.
VoronoiCorridor full_space_corridor(const GvdMap& gvd);

/// Binary PBM ("P4") with member cells black, top row first.
void write_corridor_pbm(const VoronoiCorridor& corridor, std::ostream& out);

}  // namespace g2vd
