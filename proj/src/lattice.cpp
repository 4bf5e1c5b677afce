#include "g2vd/lattice.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

namespace g2vd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct OpenEntry {
  double f;
  double h;
  std::uint64_t seq;
  double g;
  int state;
};

// Min-heap order: f, then smaller h, then insertion order.
struct OpenLater {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.seq > b.seq;
  }
};

// Swath as linear offsets plus its bounding box, for the expansion hot loop.
struct CompiledPrimitive {
  std::vector<int> offsets;
  int min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  int end_dx = 0, end_dy = 0, end_heading = 0;
  double time = 0.0;
};

std::vector<CompiledPrimitive> compile(const PrimitiveSet& prims, int width, const SpeedLimits& limits) {
  std::vector<CompiledPrimitive> out;
  out.reserve(prims.primitives.size());
  for (const auto& p : prims.primitives) {
    CompiledPrimitive c;
    c.min_x = c.min_y = std::numeric_limits<int>::max();
    c.max_x = c.max_y = std::numeric_limits<int>::min();
    for (const auto& q : p.swath) {
      c.offsets.push_back(q.iy * width + q.ix);
      c.min_x = std::min(c.min_x, q.ix);
      c.max_x = std::max(c.max_x, q.ix);
      c.min_y = std::min(c.min_y, q.iy);
      c.max_y = std::max(c.max_y, q.iy);
    }
    c.end_dx = p.end_offset.ix;
    c.end_dy = p.end_offset.iy;
    c.end_heading = p.end_heading;
    c.time = primitive_time(p, limits);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

double primitive_time(const MotionPrimitive& prim, const SpeedLimits& limits) {
  return std::max(prim.length / limits.v_max, prim.delta_theta / limits.omega_max);
}

std::optional<double> primitive_cost(const MotionPrimitive& prim, const LatticeState& at,
                                     const VoronoiField& field, const GvdMap& gvd,
                                     const SpeedLimits& limits) {
  double worst = 0.0;
  for (const auto& q : prim.swath) {
    const CellIndex c{at.ix + q.ix, at.iy + q.iy};
    if (!gvd.grid().in_bounds(c)) return std::nullopt;
    const int i = gvd.grid().index(c);
    if (gvd.is_obstacle(i) || !field.in_corridor(i)) return std::nullopt;
    worst = std::max(worst, field.rho(i));
  }
  return primitive_time(prim, limits) * (worst + 1.0);
}

HeuristicMap build_h2d(const VoronoiField& field, CellIndex goal, const SpeedLimits& limits) {
  if (!field.in_corridor(goal)) throw PreconditionError("h2D goal cell is outside the corridor");
  HeuristicMap hm;
  hm.width = field.width();
  hm.height = field.height();
  hm.goal = goal;
  hm.h.assign(static_cast<std::size_t>(hm.width) * hm.height, kInf);
  const double straight = field.resolution() / limits.v_max;
  const double diagonal = straight * std::sqrt(2.0);

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const int g = goal.iy * hm.width + goal.ix;
  hm.h[g] = 0.0;
  open.emplace(0.0, g);
  while (!open.empty()) {
    auto [d, u] = open.top();
    open.pop();
    if (d > hm.h[u]) continue;
    const int ux = u % hm.width;
    const int uy = u / hm.width;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int x = ux + dx;
        const int y = uy + dy;
        if (x < 0 || y < 0 || x >= hm.width || y >= hm.height) continue;
        const int w = y * hm.width + x;
        if (!field.in_corridor(w)) continue;
        const double cand = d + ((dx != 0 && dy != 0) ? diagonal : straight) * (field.rho(w) + 1.0);
        if (cand < hm.h[w]) {
          hm.h[w] = cand;
          open.emplace(cand, w);
        }
      }
    }
  }
  return hm;
}

CellIndex snap_to_corridor(const GvdMap& gvd, const VoronoiField& field, const Eigen::Vector2d& p,
                           double radius) {
  const auto& grid = gvd.grid();
  const CellIndex c = world_to_cell(grid, p);
  if (field.in_corridor(c)) return c;
  const int r = static_cast<int>(std::ceil(radius / grid.resolution()));
  CellIndex best = c;
  double best_d = kInf;
  for (int y = c.iy - r; y <= c.iy + r; ++y) {
    for (int x = c.ix - r; x <= c.ix + r; ++x) {
      const CellIndex q{x, y};
      if (!grid.in_bounds(q) || !field.in_corridor(q)) continue;
      const double d = (cell_to_world(grid, q) - p).norm();
      if (d <= radius && d < best_d) {
        best_d = d;
        best = q;
      }
    }
  }
  if (!std::isfinite(best_d)) {
    throw PlanningError("no corridor cell within " + std::to_string(radius) + " m of (" +
                        std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")");
  }
  return best;
}

SearchResult plan(const Pose& start, const Pose& goal, const GvdMap& gvd, const VoronoiField& field,
                  const PrimitiveSet& prims, const SpeedLimits& limits, const PlanOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& grid = gvd.grid();
  if (std::abs(prims.resolution - grid.resolution()) > 1e-12) {
    throw PreconditionError("primitive resolution does not match the map");
  }
  if (!(limits.v_max > 0.0) || !(limits.omega_max > 0.0)) throw PreconditionError("speed limits must be positive");
  const double snap = options.snap_radius > 0.0 ? options.snap_radius : 2.0 * prims.r_c;

  SearchResult result;
  const CellIndex sc = snap_to_corridor(gvd, field, start.position(), snap);
  const CellIndex gc = snap_to_corridor(gvd, field, goal.position(), snap);
  result.start = {sc.ix, sc.iy, nearest_heading(start.theta)};
  result.goal = {gc.ix, gc.iy, nearest_heading(goal.theta)};
  auto pose_of = [&](const LatticeState& s) {
    const Eigen::Vector2d p = cell_to_world(grid, s.cell());
    return Pose{p.x(), p.y(), heading_angle(s.ih)};
  };

  if (result.start == result.goal) {
    result.path = {pose_of(result.start)};
    result.graph_size = 1;
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  }

  const HeuristicMap h2d = build_h2d(field, gc, limits);
  if (!std::isfinite(h2d.at(sc))) throw NoPathError("no path in corridor: start cannot reach goal", 0);

  const int width = grid.width();
  const int height = grid.height();
  const auto compiled = compile(prims, width, limits);

  // Cells a swath may not touch, and the potential per cell.
  const std::size_t cells = grid.size();
  std::vector<std::uint8_t> blocked(cells);
  std::vector<double> rho(cells, 0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    blocked[i] = (gvd.is_obstacle(static_cast<int>(i)) || !field.in_corridor(static_cast<int>(i))) ? 1 : 0;
    if (!blocked[i]) rho[i] = field.rho(static_cast<int>(i));
  }

  const std::size_t states = cells * kNumHeadings;
  std::vector<double> g(states, kInf);
  std::vector<int> parent(states, -1);
  std::vector<int> parent_prim(states, -1);
  std::vector<std::uint8_t> closed(states, 0);
  auto encode = [&](const LatticeState& s) { return (s.iy * width + s.ix) * kNumHeadings + s.ih; };

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenLater> open;
  std::uint64_t seq = 0;
  const int s0 = encode(result.start);
  const int goal_state = encode(result.goal);
  g[s0] = 0.0;
  result.graph_size = 1;
  open.push({h2d.at(sc), h2d.at(sc), seq++, 0.0, s0});

  bool found = false;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const int s = top.state;
    if (closed[s] || top.g > g[s]) continue;
    closed[s] = 1;
    if (s == goal_state) {
      found = true;
      break;
    }
    ++result.expansions;
    const int cell = s / kNumHeadings;
    const int ih = s % kNumHeadings;
    const int x = cell % width;
    const int y = cell / width;
    if (options.record_expanded) result.expanded_cells.push_back({x, y});
    for (std::size_t pi : prims.by_heading[ih]) {
      const auto& cp = compiled[pi];
      if (x + cp.min_x < 0 || y + cp.min_y < 0 || x + cp.max_x >= width || y + cp.max_y >= height) continue;
      const int nx = x + cp.end_dx;
      const int ny = y + cp.end_dy;
      const int ns = (ny * width + nx) * kNumHeadings + cp.end_heading;
      if (closed[ns]) continue;
      double worst = 0.0;
      bool ok = true;
      for (int off : cp.offsets) {
        const int c = cell + off;
        if (blocked[c]) {
          ok = false;
          break;
        }
        worst = std::max(worst, rho[c]);
      }
      if (!ok) continue;
      const double ng = g[s] + cp.time * (worst + 1.0);
      if (ng < g[ns]) {
        if (!std::isfinite(g[ns])) ++result.graph_size;
        g[ns] = ng;
        parent[ns] = s;
        parent_prim[ns] = static_cast<int>(pi);
        const double h = h2d.h[ny * width + nx];
        open.push({ng + h, h, seq++, ng, ns});
      }
    }
  }
  if (!found) {
    throw NoPathError("no path in corridor after " + std::to_string(result.expansions) + " expansions",
                      result.expansions);
  }

  result.cost = g[goal_state];
  for (int s = goal_state; parent[s] >= 0; s = parent[s]) {
    const int p = parent[s];
    const int cell = p / kNumHeadings;
    result.steps.push_back({{cell % width, cell / width, p % kNumHeadings},
                            static_cast<std::size_t>(parent_prim[s])});
  }
  std::reverse(result.steps.begin(), result.steps.end());
  result.path.push_back(pose_of(result.start));
  for (const auto& step : result.steps) {
    const Pose origin = pose_of(step.from);
    const auto& prim = prims.primitives[step.primitive];
    for (std::size_t k = 1; k < prim.poses.size(); ++k) {
      const Pose& q = prim.poses[k];
      result.path.push_back({origin.x + q.x, origin.y + q.y, q.theta});
    }
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

void write_search_metrics_csv(const SearchResult& result, std::ostream& out, bool header) {
  if (header) out << "expansions,time_s,graph_size,path_cost\n";
  out << result.expansions << ',' << result.wall_time << ',' << result.graph_size << ',' << result.cost << '\n';
}

void write_pose_list(const std::vector<Pose>& poses, std::ostream& out) {
  const auto old = out.precision(12);
  for (const auto& p : poses) out << p.x << ' ' << p.y << ' ' << p.theta << '\n';
  out.precision(old);
}

}  // namespace g2vd
