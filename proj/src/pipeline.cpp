#include "g2vd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "g2vd/error.hpp"

namespace g2vd {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Rethrows the active exception with `stage: ` prefixed, keeping its category.
[[noreturn]] void rethrow_in_stage(const std::string& stage) {
  const std::string p = stage + ": ";
  try {
    throw;
  } catch (const NoPathError& e) {
    throw NoPathError(p + e.what(), e.expansions());
  } catch (const PlanningError& e) {
    throw PlanningError(p + e.what());
  } catch (const ParseError& e) {
    throw ParseError(p + e.what());
  } catch (const StructuralError& e) {
    throw StructuralError(p + e.what());
  } catch (const RangeError& e) {
    throw RangeError(p + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(p + e.what());
  } catch (const DomainError& e) {
    throw DomainError(p + e.what());
  } catch (const NumericError& e) {
    throw NumericError(p + e.what());
  } catch (const Error& e) {
    throw Error(p + e.what());
  }
}

template <typename F>
auto run_stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    rethrow_in_stage(name);
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + text + "'", line);
  }
  if (used != text.size() || !std::isfinite(v)) throw ParseError("expected a number, got '" + text + "'", line);
  return v;
}

Pose parse_pose(const std::string& text, std::size_t line) {
  std::istringstream ss(text);
  std::string a, b, c, extra;
  if (!(ss >> a >> b >> c) || (ss >> extra)) throw ParseError("pose must be 'x y theta'", line);
  return {parse_number(a, line), parse_number(b, line), parse_number(c, line)};
}

std::vector<Pose> truncate_path(const std::vector<Pose>& path, double length) {
  std::vector<Pose> out;
  double acc = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) acc += (path[i].position() - path[i - 1].position()).norm();
    out.push_back(path[i]);
    if (acc >= length) break;
  }
  return out;
}

}  // namespace

const char* mode_name(PlannerMode mode) { return mode == PlannerMode::Corridor ? "corridor" : "full"; }

PlannerMode parse_mode(const std::string& text) {
  if (text == "corridor") return PlannerMode::Corridor;
  if (text == "full" || text == "full-space") return PlannerMode::FullSpace;
  throw ParseError("unknown mode '" + text + "' (expected corridor or full)");
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  Scenario sc;
  bool have_map = false, have_start = false, have_goal = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'key: value'", line);
    const std::string key = trim(text.substr(0, colon));
    const std::string value = trim(text.substr(colon + 1));
    if (key == "name") {
      sc.name = value;
    } else if (key == "map") {
      const std::filesystem::path p(value);
      sc.map = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      have_map = true;
    } else if (key == "start") {
      sc.start = parse_pose(value, line);
      have_start = true;
    } else if (key == "goal") {
      sc.goal = parse_pose(value, line);
      have_goal = true;
    } else if (key == "v_max") {
      sc.limits.v_max = parse_number(value, line);
    } else if (key == "omega_max") {
      sc.limits.omega_max = parse_number(value, line);
    } else if (key == "a_max") {
      sc.limits.a_max = parse_number(value, line);
    } else if (key == "r_c") {
      sc.r_c = parse_number(value, line);
    } else if (key == "d_o_min") {
      sc.d_o_min = parse_number(value, line);
    } else if (key == "w_s") {
      sc.w_s = parse_number(value, line);
    } else if (key == "w_r") {
      sc.w_r = parse_number(value, line);
    } else if (key == "seed") {
      const double v = parse_number(value, line);
      if (v < 0 || v != std::floor(v)) throw ParseError("seed must be a non-negative integer", line);
      sc.seed = static_cast<std::uint64_t>(v);
    } else if (key == "mode") {
      try {
        sc.mode = parse_mode(value);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line);
      }
    } else if (key == "local_length") {
      sc.local_length = parse_number(value, line);
    } else if (key == "flat_field") {
      if (value != "true" && value != "false") throw ParseError("flat_field must be true or false", line);
      sc.flat_field = value == "true";
    } else {
      throw ParseError("unknown key '" + key + "'", line);
    }
  }
  if (!have_map) throw ParseError("scenario lacks 'map'");
  if (!have_start) throw ParseError("scenario lacks 'start'");
  if (!have_goal) throw ParseError("scenario lacks 'goal'");
  if (!(sc.r_c > 0.0)) throw RangeError("r_c must be positive");
  if (sc.name.empty()) sc.name = sc.map.stem().string();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario " + path.string());
  return parse_scenario(in, path.parent_path());
}

void write_scenario(const Scenario& sc, std::ostream& out) {
  const auto old = out.precision(17);
  out << "name: " << sc.name << '\n'
      << "map: " << sc.map.string() << '\n'
      << "start: " << sc.start.x << ' ' << sc.start.y << ' ' << sc.start.theta << '\n'
      << "goal: " << sc.goal.x << ' ' << sc.goal.y << ' ' << sc.goal.theta << '\n'
      << "v_max: " << sc.limits.v_max << '\n'
      << "omega_max: " << sc.limits.omega_max << '\n'
      << "a_max: " << sc.limits.a_max << '\n'
      << "r_c: " << sc.r_c << '\n'
      << "d_o_min: " << sc.d_o_min << '\n'
      << "w_s: " << sc.w_s << '\n'
      << "w_r: " << sc.w_r << '\n'
      << "seed: " << sc.seed << '\n'
      << "mode: " << mode_name(sc.mode) << '\n'
      << "local_length: " << sc.local_length << '\n'
      << "flat_field: " << (sc.flat_field ? "true" : "false") << '\n';
  out.precision(old);
}

PlanningContext make_context(const OccupancyGrid& grid, double footprint_half) {
  PlanningContext ctx;
  ctx.gvd = build_gvd(grid);
  ctx.primitives = generate_primitives(grid.resolution(), footprint_half);
  return ctx;
}

PlanOutcome plan_end_to_end(const Scenario& sc, const PlanningContext& ctx) {
  const GvdMap& gvd = ctx.gvd;
  const auto& grid = gvd.grid();
  if (std::abs(ctx.primitives.footprint - sc.footprint_half()) > 1e-9) {
    throw PreconditionError("primitive footprint does not match the scenario r_c");
  }
  for (const Pose* p : {&sc.start, &sc.goal}) {
    const Eigen::Vector2d w = p->position();
    const Eigen::Vector2d lo = grid.origin();
    const Eigen::Vector2d hi = lo + grid.resolution() * Eigen::Vector2d(grid.width(), grid.height());
    if (w.x() < lo.x() || w.y() < lo.y() || w.x() >= hi.x() || w.y() >= hi.y()) {
      throw RangeError("scenario pose outside the map");
    }
  }

  PlanOutcome out;
  auto t0 = Clock::now();
  out.corridor = run_stage("corridor", [&] {
    // Without any Voronoi cell (no obstacles, or a single one) there is no skeleton to follow.
    if (sc.mode == PlannerMode::FullSpace || gvd.voronoi_count() == 0) return full_space_corridor(gvd);
    const VoronoiPath vp = find_voronoi_path(gvd, world_to_cell(grid, sc.start.position()),
                                             world_to_cell(grid, sc.goal.position()), sc.r_c);
    return build_corridor(gvd, vp);
  });
  out.timings.corridor_ms = ms_since(t0);

  t0 = Clock::now();
  out.field = run_stage("field", [&] { return build_field(gvd, out.corridor, sc.effective_d_o_min(), sc.flat_field); });
  out.timings.field_ms = ms_since(t0);

  out.search = run_stage("search", [&] {
    return plan(sc.start, sc.goal, gvd, out.field, ctx.primitives, {sc.limits.v_max, sc.limits.omega_max});
  });
  out.timings.search_ms = out.search.wall_time * 1e3;

  t0 = Clock::now();
  out.reference = run_stage("smoothing", [&] {
    const auto path = sc.local_length > 0.0 ? truncate_path(out.search.path, sc.local_length) : out.search.path;
    ReferenceOptions opts;
    opts.reject_tight = false;
    return build_reference(path, gvd, sc.r_c, opts);
  });
  SmootherConfig cfg;
  cfg.w_s = sc.w_s;
  cfg.w_r = sc.w_r;
  out.smoothed = run_stage("smoothing", [&] { return smooth(out.reference, cfg); });
  out.timings.smooth_ms = ms_since(t0);

  out.min_clearance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.smoothed.vertices.size(); ++i) {
    const double d = clearance_at(gvd, world_to_cell(grid, out.smoothed.vertices[i]));
    out.min_clearance = std::min(out.min_clearance, d);
    const double floor = std::min(sc.r_c, out.reference.clearances[i]) - grid.resolution();
    if (d < floor) {
      throw PlanningError("smoothing: vertex " + std::to_string(i) + " lost clearance (" + std::to_string(d) + " m)");
    }
  }

  t0 = Clock::now();
  run_stage("velocity", [&] {
    std::vector<Eigen::Vector2d> knots;
    for (const auto& v : out.smoothed.vertices) {
      if (knots.empty() || (v - knots.back()).norm() > 1e-9) knots.push_back(v);
    }
    out.spline = fit_spline(knots);
    const double ds = 0.1;
    out.profile = plan_velocity(out.spline, sc.limits, 0.0, 0.0, ds);
    out.metrics = compute_metrics(out.spline, out.profile, ds);
    for (std::size_t k = 0; k < out.profile.samples.size(); ++k) {
      if (out.profile.samples[k].v > out.profile.cap(k) + 1e-9) throw PlanningError("profile exceeds speed cap");
    }
    return 0;
  });
  out.timings.velocity_ms = ms_since(t0);
  return out;
}

PlanOutcome plan_end_to_end(const Scenario& sc) {
  const OccupancyGrid grid = run_stage("map", [&] { return load_map(sc.map); });
  const PlanningContext ctx = run_stage("gvd", [&] { return make_context(grid, sc.footprint_half()); });
  return plan_end_to_end(sc, ctx);
}

TimingStats timing_stats(const std::vector<double>& samples) {
  TimingStats st;
  st.count = samples.size();
  if (samples.empty()) return st;
  st.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
  st.max = *std::max_element(samples.begin(), samples.end());
  st.min = *std::min_element(samples.begin(), samples.end());
  double var = 0.0;
  for (double s : samples) var += (s - st.mean) * (s - st.mean);
  st.std = std::sqrt(var / samples.size());
  return st;
}

BenchmarkReport run_benchmark(const std::vector<Scenario>& scenarios, const std::vector<const PlanningContext*>& contexts,
                              int repetitions) {
  if (contexts.size() != scenarios.size()) throw PreconditionError("one context per scenario required");
  if (repetitions < 0) throw PreconditionError("repetitions must be non-negative");
  BenchmarkReport rep;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    for (int r = 0; r < repetitions; ++r) {
      BenchmarkRow row;
      row.scenario = scenarios[i].name;
      row.mode = scenarios[i].mode;
      row.repetition = r;
      try {
        const PlanOutcome o = plan_end_to_end(scenarios[i], *contexts[i]);
        row.success = true;
        row.expansions = o.search.expansions;
        row.graph_size = o.search.graph_size;
        row.path_cost = o.search.cost;
        row.metrics = o.metrics;
        row.search_ms = o.timings.search_ms;
        row.smooth_ms = o.timings.smooth_ms;
      } catch (const NoPathError& e) {
        row.error = e.what();
        row.expansions = e.expansions();
      } catch (const Error& e) {
        row.error = e.what();
      }
      rep.rows.push_back(std::move(row));
    }
  }

  std::vector<double> search, smoothing;
  std::map<std::pair<std::string, int>, std::pair<const BenchmarkRow*, const BenchmarkRow*>> pairs;
  for (const auto& row : rep.rows) {
    if (!row.success) continue;
    search.push_back(row.search_ms);
    smoothing.push_back(row.smooth_ms);
    auto& slot = pairs[{row.scenario, row.repetition}];
    (row.mode == PlannerMode::Corridor ? slot.first : slot.second) = &row;
  }
  rep.search_ms = timing_stats(search);
  rep.smooth_ms = timing_stats(smoothing);
  double exp_sum = 0.0, graph_sum = 0.0;
  std::size_t n = 0;
  for (const auto& [key, pr] : pairs) {
    if (!pr.first || !pr.second || pr.second->expansions == 0 || pr.second->graph_size == 0) continue;
    exp_sum += 100.0 * (1.0 - static_cast<double>(pr.first->expansions) / pr.second->expansions);
    graph_sum += 100.0 * (1.0 - static_cast<double>(pr.first->graph_size) / pr.second->graph_size);
    ++n;
  }
  if (n > 0) {
    rep.expansion_reduction_pct = exp_sum / n;
    rep.graph_size_reduction_pct = graph_sum / n;
  }
  return rep;
}

BenchmarkReport run_benchmark(const std::vector<Scenario>& scenarios, int repetitions) {
  std::map<std::pair<std::string, double>, PlanningContext> cache;
  std::vector<const PlanningContext*> contexts;
  std::vector<Scenario> runnable;
  BenchmarkReport failed;
  for (const auto& sc : scenarios) {
    const auto key = std::make_pair(sc.map.string(), sc.footprint_half());
    auto it = cache.find(key);
    if (it == cache.end()) {
      try {
        it = cache.emplace(key, make_context(load_map(sc.map), sc.footprint_half())).first;
      } catch (const Error& e) {
        for (int r = 0; r < repetitions; ++r) {
          BenchmarkRow row;
          row.scenario = sc.name;
          row.mode = sc.mode;
          row.repetition = r;
          row.error = std::string("map: ") + e.what();
          failed.rows.push_back(row);
        }
        continue;
      }
    }
    runnable.push_back(sc);
    contexts.push_back(&it->second);
  }
  BenchmarkReport rep = run_benchmark(runnable, contexts, repetitions);
  rep.rows.insert(rep.rows.end(), failed.rows.begin(), failed.rows.end());
  return rep;
}

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out) {
  const auto old = out.precision(10);
  out << "scenario,mode,rep,status,expansions,graph_size,path_cost,S,T,K_max,K_mean,search_ms,smooth_ms\n";
  for (const auto& r : report.rows) {
    out << r.scenario << ',' << mode_name(r.mode) << ',' << r.repetition << ',' << (r.success ? "ok" : "failed")
        << ',' << r.expansions << ',' << r.graph_size << ',' << r.path_cost << ',' << r.metrics.S << ','
        << r.metrics.T << ',' << r.metrics.K_max << ',' << r.metrics.K_mean << ',';
    out.precision(3);
    out << std::fixed << r.search_ms << ',' << r.smooth_ms << '\n';
    out.unsetf(std::ios::floatfield);
    out.precision(10);
  }
  out.precision(old);
}

void write_benchmark_summary(const BenchmarkReport& report, std::ostream& out) {
  auto line = [&out](const char* label, const TimingStats& s) {
    out << label << " ms: mean " << s.mean << " max " << s.max << " min " << s.min << " std " << s.std << " (n="
        << s.count << ")\n";
  };
  line("search", report.search_ms);
  line("smoothing", report.smooth_ms);
  if (report.expansion_reduction_pct) out << "expansion reduction %: " << *report.expansion_reduction_pct << '\n';
  if (report.graph_size_reduction_pct) out << "graph size reduction %: " << *report.graph_size_reduction_pct << '\n';
}

Maze generate_maze(const MazeSpec& spec) {
  if (spec.width < 20 || spec.height < 20) throw PreconditionError("maze dimensions must be at least 20 cells");
  if (spec.corridor_width < 3) {
    throw PreconditionError("corridor too narrow: " + std::to_string(spec.corridor_width) + " cells (minimum 3)");
  }
  const int wall = spec.wall_width > 0 ? spec.wall_width : spec.corridor_width;
  const int pitch = spec.corridor_width + wall;
  const int nx = (spec.width - wall) / pitch;
  const int ny = (spec.height - wall) / pitch;
  if (nx < 1 || ny < 1) throw PreconditionError("maze too small for the corridor and wall widths");

  Maze maze;
  maze.grid = OccupancyGrid(spec.width, spec.height, spec.resolution, Eigen::Vector2d::Zero(), CellState::Occupied);
  auto fill = [&](int x0, int y0, int w, int h) {
    for (int y = y0; y < y0 + h; ++y)
      for (int x = x0; x < x0 + w; ++x) maze.grid.set({x, y}, CellState::Free);
  };
  auto cell_x = [&](int i) { return wall + i * pitch; };
  auto cell_y = [&](int j) { return wall + j * pitch; };
  // Opens the wall between maze cell (i, j) and its +x (dir 0) or +y (dir 1) neighbour.
  auto open = [&](int i, int j, int dir) {
    if (dir == 0) fill(cell_x(i) + spec.corridor_width, cell_y(j), wall, spec.corridor_width);
    else fill(cell_x(i), cell_y(j) + spec.corridor_width, spec.corridor_width, wall);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) fill(cell_x(i), cell_y(j), spec.corridor_width, spec.corridor_width);

  std::mt19937_64 rng(spec.seed);
  auto pick = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(nx) * ny, 0);
  // carved[k] for wall k = 2 * (j * nx + i) + dir.
  std::vector<std::uint8_t> carved(visited.size() * 2, 0);
  std::vector<std::pair<int, int>> stack{{0, 0}};
  visited[0] = 1;
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    std::vector<std::array<int, 3>> options;  // neighbour i, j, wall id
    if (i + 1 < nx && !visited[j * nx + i + 1]) options.push_back({i + 1, j, 2 * (j * nx + i)});
    if (i > 0 && !visited[j * nx + i - 1]) options.push_back({i - 1, j, 2 * (j * nx + i - 1)});
    if (j + 1 < ny && !visited[(j + 1) * nx + i]) options.push_back({i, j + 1, 2 * (j * nx + i) + 1});
    if (j > 0 && !visited[(j - 1) * nx + i]) options.push_back({i, j - 1, 2 * ((j - 1) * nx + i) + 1});
    if (options.empty()) {
      stack.pop_back();
      continue;
    }
    const auto& o = options[pick(options.size())];
    carved[o[2]] = 1;
    visited[o[1] * nx + o[0]] = 1;
    stack.push_back({o[0], o[1]});
  }

  std::vector<int> closed;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int k = 2 * (j * nx + i);
      if (i + 1 < nx) (carved[k] ? open(i, j, 0) : closed.push_back(k));
      if (j + 1 < ny) (carved[k + 1] ? open(i, j, 1) : closed.push_back(k + 1));
    }
  }
  for (std::size_t k = closed.size(); k > 1; --k) std::swap(closed[k - 1], closed[pick(k)]);
  const auto removals = static_cast<std::size_t>(std::lround(spec.loop_fraction * closed.size()));
  for (std::size_t r = 0; r < removals && r < closed.size(); ++r) {
    const int id = closed[r] / 2;
    open(id % nx, id / nx, closed[r] % 2);
  }

  const double half = 0.5 * spec.corridor_width * spec.resolution;
  maze.start = {cell_x(0) * spec.resolution + half, cell_y(0) * spec.resolution + half, 0.0};
  maze.goal = {cell_x(nx - 1) * spec.resolution + half, cell_y(ny - 1) * spec.resolution + half, 0.0};
  return maze;
}

OccupancyGrid generate_maze(int width, int height, int corridor_width, std::uint64_t seed) {
  MazeSpec spec;
  spec.width = width;
  spec.height = height;
  spec.corridor_width = corridor_width;
  spec.wall_width = 0;
  spec.seed = seed;
  return generate_maze(spec).grid;
}

std::string render_svg(const SvgScene& scene) {
  std::ostringstream s;
  s.precision(6);
  int w = 1, h = 1;
  double res = 1.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  if (scene.grid) {
    w = scene.grid->width();
    h = scene.grid->height();
    res = scene.grid->resolution();
    origin = scene.grid->origin();
  }
  const double W = w * res, H = h * res;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << ' ' << H << "\" width=\"" << 4 * w
    << "\" height=\"" << 4 * h << "\">\n"
    << "<g transform=\"translate(" << -origin.x() << ' ' << H + origin.y() << ") scale(1 -1)\">\n"
    << "<rect id=\"background\" x=\"" << origin.x() << "\" y=\"" << origin.y() << "\" width=\"" << W
    << "\" height=\"" << H << "\" fill=\"white\"/>\n";

  // Horizontal runs of cells satisfying `pred`, as rects.
  auto runs = [&](const char* id, const char* style, auto pred) {
    std::ostringstream body;
    body.precision(6);
    bool any = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w;) {
        if (!pred(CellIndex{x, y})) {
          ++x;
          continue;
        }
        int e = x;
        while (e < w && pred(CellIndex{e, y})) ++e;
        body << "<rect x=\"" << origin.x() + x * res << "\" y=\"" << origin.y() + y * res << "\" width=\""
             << (e - x) * res << "\" height=\"" << res << "\"/>\n";
        any = true;
        x = e;
      }
    }
    if (any) s << "<g id=\"" << id << "\" " << style << ">\n" << body.str() << "</g>\n";
  };
  if (scene.grid) {
    runs("occupancy", "fill=\"black\"", [&](CellIndex c) { return scene.grid->at(c) == CellState::Occupied; });
    runs("unknown", "fill=\"#999999\"", [&](CellIndex c) { return scene.grid->at(c) == CellState::Unknown; });
  }
  if (scene.corridor) {
    runs("corridor", "fill=\"#3a7bd5\" fill-opacity=\"0.2\"", [&](CellIndex c) { return scene.corridor->contains(c); });
  }
  if (scene.gvd) runs("voronoi", "fill=\"#f0a000\"", [&](CellIndex c) { return scene.gvd->is_voronoi(c); });

  if (!scene.footprints.empty() && scene.footprint_half > 0.0) {
    s << "<g id=\"footprints\" fill=\"none\" stroke=\"#555555\" stroke-width=\"" << 0.2 * res << "\">\n";
    for (const auto& p : scene.footprints) {
      const double a = scene.footprint_half;
      const Eigen::Rotation2Dd R(p.theta);
      s << "<polygon points=\"";
      for (const auto& corner : {Eigen::Vector2d(a, a), Eigen::Vector2d(-a, a), Eigen::Vector2d(-a, -a),
                                 Eigen::Vector2d(a, -a)}) {
        const Eigen::Vector2d q = p.position() + R * corner;
        s << q.x() << ',' << q.y() << ' ';
      }
      s << "\"/>\n";
    }
    s << "</g>\n";
  }
  auto polyline = [&](const char* id, const char* color, const std::vector<Eigen::Vector2d>& pts) {
    if (pts.size() < 2) return;
    s << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << 0.5 * res
      << "\" points=\"";
    for (const auto& p : pts) s << p.x() << ',' << p.y() << ' ';
    s << "\"/>\n";
  };
  std::vector<Eigen::Vector2d> searched;
  for (const auto& p : scene.searched) searched.push_back(p.position());
  polyline("searched", "green", searched);
  polyline("smoothed", "red", scene.smoothed);
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace g2vd
