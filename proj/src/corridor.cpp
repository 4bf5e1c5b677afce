#include "g2vd/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <tuple>

#include "g2vd/error.hpp"

namespace g2vd {

namespace {

constexpr int kNeighbors[8][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1},
                                  {1, 1}, {-1, 1}, {-1, -1}, {1, -1}};

std::string describe(CellIndex c) {
  return "(" + std::to_string(c.ix) + ", " + std::to_string(c.iy) + ")";
}

std::vector<CellIndex> backtrack(const OccupancyGrid& grid, const std::vector<int>& parent, int from) {
  std::vector<CellIndex> path;
  for (int i = from; i >= 0; i = parent[i]) path.push_back(grid.cell(i));
  std::reverse(path.begin(), path.end());
  return path;
}

double octile(CellIndex a, CellIndex b) {
  const double dx = std::abs(a.ix - b.ix);
  const double dy = std::abs(a.iy - b.iy);
  return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
}

}  // namespace

std::size_t VoronoiCorridor::count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

GridPathResult nearest_gvd_cell(const GvdMap& gvd, CellIndex c, double r_c) {
  const auto& grid = gvd.grid();
  if (!grid.in_bounds(c)) throw RangeError("cell " + describe(c) + " outside the map");
  const int start = grid.index(c);
  if (gvd.is_obstacle(start) || !has_clearance(gvd, start, r_c)) {
    throw PreconditionError("cell " + describe(c) + " lacks clearance for the robot");
  }
  std::vector<int> parent(grid.size(), -1);
  std::vector<std::uint8_t> seen(grid.size(), 0);
  std::deque<int> queue{start};
  seen[start] = 1;
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    if (gvd.is_voronoi(cur)) return {grid.cell(cur), backtrack(grid, parent, cur)};
    const CellIndex cc = grid.cell(cur);
    for (const auto& d : kNeighbors) {
      CellIndex n{cc.ix + d[0], cc.iy + d[1]};
      if (!grid.in_bounds(n)) continue;
      const int ni = grid.index(n);
      if (seen[ni] || gvd.is_obstacle(ni) || !has_clearance(gvd, ni, r_c)) continue;
      seen[ni] = 1;
      parent[ni] = cur;
      queue.push_back(ni);
    }
  }
  throw PlanningError("isolated start/goal: no Voronoi cell reachable from " + describe(c));
}

std::vector<CellIndex> voronoi_astar(const GvdMap& gvd, CellIndex c1, CellIndex c2, double r_c) {
  const auto& grid = gvd.grid();
  if (!grid.in_bounds(c1) || !grid.in_bounds(c2)) throw RangeError("Voronoi A* endpoint outside the map");
  const int s = grid.index(c1);
  const int t = grid.index(c2);
  auto valid = [&](int i) { return gvd.is_voronoi(i) && has_clearance(gvd, i, r_c); };
  if (!valid(s) || !valid(t)) throw PreconditionError("Voronoi A* endpoints must be valid Voronoi cells");

  // (f, h, cell) ordering: lower heuristic first on f ties, then cell order.
  using Entry = std::tuple<double, double, CellIndex, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<double> g(grid.size(), std::numeric_limits<double>::infinity());
  std::vector<int> parent(grid.size(), -1);
  std::vector<std::uint8_t> closed(grid.size(), 0);
  g[s] = 0.0;
  open.emplace(octile(c1, c2), octile(c1, c2), c1, s);
  while (!open.empty()) {
    auto [f, h, cell, cur] = open.top();
    open.pop();
    if (closed[cur]) continue;
    closed[cur] = 1;
    if (cur == t) return backtrack(grid, parent, cur);
    for (const auto& d : kNeighbors) {
      CellIndex n{cell.ix + d[0], cell.iy + d[1]};
      if (!grid.in_bounds(n)) continue;
      const int ni = grid.index(n);
      if (closed[ni] || !valid(ni)) continue;
      const double step = (d[0] != 0 && d[1] != 0) ? std::sqrt(2.0) : 1.0;
      const double cand = g[cur] + step;
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = cur;
        const double hn = octile(n, c2);
        open.emplace(cand + hn, hn, n, ni);
      }
    }
  }
  throw PlanningError("no Voronoi route between " + describe(c1) + " and " + describe(c2));
}

double grid_path_cost(const std::vector<CellIndex>& cells) {
  double cost = 0.0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const bool diag = cells[i].ix != cells[i - 1].ix && cells[i].iy != cells[i - 1].iy;
    cost += diag ? std::sqrt(2.0) : 1.0;
  }
  return cost;
}

VoronoiPath find_voronoi_path(const GvdMap& gvd, CellIndex start, CellIndex goal, double r_c) {
  auto l1 = nearest_gvd_cell(gvd, start, r_c);
  auto l2 = nearest_gvd_cell(gvd, goal, r_c);
  auto l3 = voronoi_astar(gvd, l1.cell, l2.cell, r_c);

  VoronoiPath path;
  path.cells = l1.path;
  path.c1 = path.cells.size() - 1;
  path.cells.insert(path.cells.end(), l3.begin() + 1, l3.end());
  path.c2 = path.cells.size() - 1;
  for (auto it = l2.path.rbegin() + 1; it != l2.path.rend(); ++it) path.cells.push_back(*it);
  return path;
}

VoronoiCorridor build_corridor(const GvdMap& gvd, const VoronoiPath& path, double inflation) {
  const auto& grid = gvd.grid();
  VoronoiCorridor corridor;
  corridor.width = grid.width();
  corridor.height = grid.height();
  corridor.mask.assign(grid.size(), 0);
  corridor.source = path;
  for (const auto& c : path.cells) {
    const double d_k = clearance_at(gvd, c);
    const double half = std::isfinite(d_k) ? std::round(d_k / grid.resolution() + inflation / grid.resolution())
                                           : std::max(grid.width(), grid.height());
    const int r = static_cast<int>(half);
    for (int y = std::max(0, c.iy - r); y <= std::min(grid.height() - 1, c.iy + r); ++y) {
      for (int x = std::max(0, c.ix - r); x <= std::min(grid.width() - 1, c.ix + r); ++x) {
        const int i = grid.index({x, y});
        if (!gvd.is_obstacle(i)) corridor.mask[i] = 1;
      }
    }
  }
  return corridor;
}

VoronoiCorridor full_space_corridor(const GvdMap& gvd) {
  VoronoiCorridor corridor;
  corridor.width = gvd.width();
  corridor.height = gvd.height();
  corridor.mask.assign(gvd.size(), 0);
  for (std::size_t i = 0; i < gvd.size(); ++i) {
    corridor.mask[i] = gvd.is_obstacle(static_cast<int>(i)) ? 0 : 1;
  }
  return corridor;
}

void write_corridor_pbm(const VoronoiCorridor& corridor, std::ostream& out) {
  out << "P4\n" << corridor.width << ' ' << corridor.height << '\n';
  for (int row = 0; row < corridor.height; ++row) {
    const int iy = corridor.height - 1 - row;
    unsigned char byte = 0;
    int bit = 0;
    for (int ix = 0; ix < corridor.width; ++ix) {
      if (corridor.contains(CellIndex{ix, iy})) byte |= static_cast<unsigned char>(0x80 >> bit);
      if (++bit == 8) {
        out.put(static_cast<char>(byte));
        byte = 0;
        bit = 0;
      }
    }
    if (bit != 0) out.put(static_cast<char>(byte));
  }
}

}  // namespace g2vd
