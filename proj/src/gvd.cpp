#include "g2vd/gvd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>

#include "g2vd/distance_transform.hpp"
#include "g2vd/error.hpp"

namespace g2vd {

namespace {

constexpr int kNeighbors[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                  {1, 0},   {-1, 1}, {0, 1},  {1, 1}};

std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

std::int64_t sq(std::int64_t v) { return v * v; }

// Calls fn(index) for every in-bounds obstacle cell at exactly squared distance
// `d2` from `center`. Enumerates lattice points on the circle.
template <typename Fn>
void for_each_obstacle_on_circle(const GvdMap& g, CellIndex center, std::int64_t d2, Fn&& fn) {
  const std::int64_t r = isqrt(d2);
  for (std::int64_t dx = -r; dx <= r; ++dx) {
    const std::int64_t rem = d2 - dx * dx;
    const std::int64_t dy = isqrt(rem);
    if (dy * dy != rem) continue;
    for (std::int64_t sy : {dy, -dy}) {
      CellIndex c{center.ix + static_cast<int>(dx), center.iy + static_cast<int>(sy)};
      if (g.grid().in_bounds(c) && g.is_obstacle(c)) fn(g.grid().index(c));
      if (dy == 0) break;
    }
  }
}

int chebyshev(const OccupancyGrid& grid, int a, int b) {
  CellIndex ca = grid.cell(a);
  CellIndex cb = grid.cell(b);
  return std::max(std::abs(ca.ix - cb.ix), std::abs(ca.iy - cb.iy));
}

class TieCache {
 public:
  explicit TieCache(const GvdMap& g) : g_(g), sets_(g.size()), have_(g.size(), 0) {}

  const std::vector<int>& get(int index) {
    if (!have_[index]) {
      sets_[index] = nearest_obstacle_set(g_, index);
      have_[index] = 1;
    }
    return sets_[index];
  }

 private:
  const GvdMap& g_;
  std::vector<std::vector<int>> sets_;
  std::vector<std::uint8_t> have_;
};

// Two obstacle basins meet at `index` when its own nearest set spans
// non-adjacent obstacles, or when a free 8-neighbour's nearest set is
// nowhere adjacent to this cell's set.
bool voronoi_test(const GvdMap& g, int index, TieCache& ties) {
  if (g.is_obstacle(index) || g.sq_dist(index) == kInfiniteSqDist) return false;
  const auto& grid = g.grid();
  const auto& own = ties.get(index);
  for (std::size_t a = 0; a < own.size(); ++a) {
    for (std::size_t b = a + 1; b < own.size(); ++b) {
      if (chebyshev(grid, own[a], own[b]) > 1) return true;
    }
  }
  const CellIndex c = grid.cell(index);
  for (const auto& d : kNeighbors) {
    CellIndex n{c.ix + d[0], c.iy + d[1]};
    if (!grid.in_bounds(n)) continue;
    const int ni = grid.index(n);
    if (g.is_obstacle(ni)) continue;
    const auto& other = ties.get(ni);
    int closest = std::numeric_limits<int>::max();
    for (int a : own) {
      for (int b : other) closest = std::min(closest, chebyshev(grid, a, b));
    }
    if (closest > 1) return true;
  }
  return false;
}

// Exact canonical nearest obstacle by expanding Chebyshev rings.
std::pair<std::int64_t, int> ring_search(const GvdMap& g, CellIndex c) {
  const auto& grid = g.grid();
  std::int64_t best_d = kUnreachableSqDist;
  int best = -1;
  auto consider = [&](int x, int y) {
    CellIndex q{x, y};
    if (!grid.in_bounds(q)) return;
    const int qi = grid.index(q);
    if (!g.is_obstacle(qi)) return;
    const std::int64_t d = sq(x - c.ix) + sq(y - c.iy);
    if (d < best_d || (d == best_d && qi < best)) {
      best_d = d;
      best = qi;
    }
  };
  const int max_r = std::max(grid.width(), grid.height());
  for (int r = 0; r <= max_r; ++r) {
    if (best >= 0 && sq(r) > best_d) break;
    if (r == 0) {
      consider(c.ix, c.iy);
      continue;
    }
    for (int x = c.ix - r; x <= c.ix + r; ++x) {
      consider(x, c.iy - r);
      consider(x, c.iy + r);
    }
    for (int y = c.iy - r + 1; y <= c.iy + r - 1; ++y) {
      consider(c.ix - r, y);
      consider(c.ix + r, y);
    }
  }
  return {best_d, best};
}

std::int64_t max_finite_sq_dist(const std::vector<std::int32_t>& d) {
  std::int64_t m = -1;
  for (auto v : d) {
    if (v != kInfiniteSqDist) m = std::max<std::int64_t>(m, v);
  }
  return m;
}

}  // namespace

std::size_t GvdMap::voronoi_count() const {
  return static_cast<std::size_t>(std::count(voronoi_.begin(), voronoi_.end(), 1));
}

std::vector<int> nearest_obstacle_set(const GvdMap& gvd, int index) {
  std::vector<int> out;
  const auto d2 = gvd.sq_dist(index);
  if (d2 == kInfiniteSqDist) return out;
  for_each_obstacle_on_circle(gvd, gvd.grid().cell(index), d2, [&](int o) { out.push_back(o); });
  std::sort(out.begin(), out.end());
  return out;
}

GvdMap build_gvd(const OccupancyGrid& grid, UnknownPolicy policy) {
  GvdMap g;
  g.grid_ = grid;
  g.policy_ = policy;
  const auto n = grid.size();
  auto d2 = exact_squared_edt(grid.width(), grid.height(), [&](int i) {
    return !is_traversable(grid, grid.cell(i), policy);
  });
  g.sq_dist_.resize(n);
  g.nearest_.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (d2[i] >= kUnreachableSqDist) {
      g.sq_dist_[i] = kInfiniteSqDist;
      continue;
    }
    g.sq_dist_[i] = static_cast<std::int32_t>(d2[i]);
    int best = std::numeric_limits<int>::max();
    for_each_obstacle_on_circle(g, grid.cell(static_cast<int>(i)), d2[i],
                                [&](int o) { best = std::min(best, o); });
    g.nearest_[i] = best;
  }
  g.voronoi_.assign(n, 0);
  TieCache ties(g);
  for (std::size_t i = 0; i < n; ++i) {
    g.voronoi_[i] = voronoi_test(g, static_cast<int>(i), ties) ? 1 : 0;
  }
  return g;
}

void apply_delta(GvdMap& g, const MapDelta& delta) {
  auto& grid = g.grid_;
  for (const auto* list : {&delta.newly_occupied, &delta.newly_freed}) {
    for (const auto& c : *list) {
      if (!grid.in_bounds(c)) {
        throw RangeError("map delta cell (" + std::to_string(c.ix) + ", " + std::to_string(c.iy) +
                         ") out of bounds");
      }
    }
  }
  {
    std::vector<std::uint8_t> mark(grid.size(), 0);
    for (const auto& c : delta.newly_occupied) mark[grid.index(c)] = 1;
    for (const auto& c : delta.newly_freed) {
      if (mark[grid.index(c)]) throw PreconditionError("map delta lists are not disjoint");
    }
  }

  const std::int64_t max_before = max_finite_sq_dist(g.sq_dist_);

  std::vector<int> removed;
  std::vector<int> added;
  for (const auto& c : delta.newly_freed) {
    const int i = grid.index(c);
    const bool was = g.is_obstacle(i);
    grid.set(c, CellState::Free);
    if (was && !g.is_obstacle(i)) removed.push_back(i);
  }
  for (const auto& c : delta.newly_occupied) {
    const int i = grid.index(c);
    const bool was = g.is_obstacle(i);
    grid.set(c, CellState::Occupied);
    if (!was) added.push_back(i);
  }
  if (removed.empty() && added.empty()) return;

  std::vector<std::uint8_t> changed(grid.size(), 0);
  std::vector<int> changed_list;
  auto mark_changed = [&](int i) {
    if (!changed[i]) {
      changed[i] = 1;
      changed_list.push_back(i);
    }
  };

  // Every cell is within sqrt(max_before) of its nearest obstacle, so only
  // boxes of that radius around removed obstacles can lose their nearest.
  if (!removed.empty() && max_before >= 0) {
    const int radius = static_cast<int>(isqrt(max_before)) + 1;
    std::vector<std::uint8_t> removed_mark(grid.size(), 0);
    for (int o : removed) removed_mark[o] = 1;
    std::vector<int> recompute;
    for (int o : removed) {
      const CellIndex oc = grid.cell(o);
      for (int y = std::max(0, oc.iy - radius); y <= std::min(grid.height() - 1, oc.iy + radius); ++y) {
        for (int x = std::max(0, oc.ix - radius); x <= std::min(grid.width() - 1, oc.ix + radius); ++x) {
          const int i = grid.index({x, y});
          if (changed[i]) continue;
          const int nearest = g.nearest_[i];
          if (nearest >= 0 && removed_mark[nearest]) {
            recompute.push_back(i);
            mark_changed(i);
          } else if (g.sq_dist_[i] != kInfiniteSqDist &&
                     sq(x - oc.ix) + sq(y - oc.iy) == g.sq_dist_[i]) {
            mark_changed(i);  // a tied obstacle disappeared
          }
        }
      }
    }
    for (int i : recompute) {
      auto [d, n] = ring_search(g, grid.cell(i));
      g.sq_dist_[i] = n < 0 ? kInfiniteSqDist : static_cast<std::int32_t>(d);
      g.nearest_[i] = n;
    }
  }

  if (!added.empty()) {
    const std::int64_t max_now = max_finite_sq_dist(g.sq_dist_);
    const bool unbounded = std::any_of(g.sq_dist_.begin(), g.sq_dist_.end(),
                                       [](std::int32_t v) { return v == kInfiniteSqDist; });
    const int radius = unbounded ? std::max(grid.width(), grid.height())
                                 : static_cast<int>(isqrt(std::max<std::int64_t>(max_now, 0))) + 1;
    for (int a : added) {
      const CellIndex ac = grid.cell(a);
      for (int y = std::max(0, ac.iy - radius); y <= std::min(grid.height() - 1, ac.iy + radius); ++y) {
        for (int x = std::max(0, ac.ix - radius); x <= std::min(grid.width() - 1, ac.ix + radius); ++x) {
          const int i = grid.index({x, y});
          const std::int64_t d = sq(x - ac.ix) + sq(y - ac.iy);
          const std::int64_t cur = g.sq_dist_[i] == kInfiniteSqDist ? kUnreachableSqDist : g.sq_dist_[i];
          if (d < cur || (d == cur && a < g.nearest_[i])) {
            g.sq_dist_[i] = static_cast<std::int32_t>(d);
            g.nearest_[i] = a;
            mark_changed(i);
          } else if (d == cur) {
            mark_changed(i);  // new tied obstacle
          }
        }
      }
    }
  }

  std::vector<int> refresh;
  std::vector<std::uint8_t> queued(grid.size(), 0);
  for (int i : changed_list) {
    const CellIndex c = grid.cell(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        CellIndex n{c.ix + dx, c.iy + dy};
        if (!grid.in_bounds(n)) continue;
        const int ni = grid.index(n);
        if (!queued[ni]) {
          queued[ni] = 1;
          refresh.push_back(ni);
        }
      }
    }
  }
  TieCache ties(g);
  for (int i : refresh) g.voronoi_[i] = voronoi_test(g, i, ties) ? 1 : 0;
}

double clearance_at(const GvdMap& gvd, CellIndex c) {
  const auto d2 = gvd.sq_dist(c);
  if (d2 == kInfiniteSqDist) return std::numeric_limits<double>::infinity();
  return std::sqrt(static_cast<double>(d2)) * gvd.resolution();
}

bool has_clearance(const GvdMap& gvd, int index, double radius) {
  return clearance_at(gvd, gvd.grid().cell(index)) >= radius;
}

void write_gvd_csv(const GvdMap& gvd, std::ostream& out) {
  out << "ix,iy,sq_dist,is_voronoi\n";
  for (int iy = 0; iy < gvd.height(); ++iy) {
    for (int ix = 0; ix < gvd.width(); ++ix) {
      const auto d2 = gvd.sq_dist({ix, iy});
      out << ix << ',' << iy << ',';
      if (d2 == kInfiniteSqDist) {
        out << "inf";
      } else {
        out << d2;
      }
      out << ',' << (gvd.is_voronoi({ix, iy}) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace g2vd
