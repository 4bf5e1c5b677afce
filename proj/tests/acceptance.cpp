// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--cli <path to g2vd_cli>] [--only N] [--report FILE] [--strict]
// Exits nonzero on a failed criterion only with --strict; errors while
// evaluating a criterion are reported as FAIL lines.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "g2vd/pipeline.hpp"
#include "qp_oracle.hpp"

using namespace g2vd;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Corridor vs full-space search on generated mazes.
Verdict corridor_benefit() {
  const auto t0 = Clock::now();
  int equal_cost = 0, both = 0, fewer_exp = 0, smaller_graph = 0;
  double reduction_sum = 0.0, graph_sum = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    MazeSpec spec;
    spec.seed = seed;
    const Maze maze = generate_maze(spec);
    Scenario sc;
    sc.start = maze.start;
    sc.goal = maze.goal;
    const PlanningContext ctx = make_context(maze.grid, sc.footprint_half());
    SearchResult rc, rf;
    try {
      rc = plan_end_to_end(sc, ctx).search;
      sc.mode = PlannerMode::FullSpace;
      rf = plan_end_to_end(sc, ctx).search;
    } catch (const Error& e) {
      per_seed += fmt(" s%d:error", int(seed));
      continue;
    }
    ++both;
    equal_cost += rc.cost == rf.cost;
    fewer_exp += rc.expansions < rf.expansions;
    smaller_graph += rc.graph_size < rf.graph_size;
    const double red = 100.0 * (1.0 - double(rc.expansions) / double(rf.expansions));
    reduction_sum += red;
    graph_sum += 100.0 * (1.0 - double(rc.graph_size) / double(rf.graph_size));
    per_seed += fmt(" s%d:%.1f%%%s", int(seed), red, rc.cost == rf.cost ? "" : "(cost+)");
  }
  const double elapsed = seconds_since(t0);
  const double mean_red = both ? reduction_sum / both : 0.0;
  const double mean_graph = both ? graph_sum / both : 0.0;
  Verdict v;
  v.pass = equal_cost >= 8 && fewer_exp == both && smaller_graph == both && mean_red >= 5.0 && elapsed < 60.0;
  v.detail = fmt("equal cost %d/10, fewer expansions %d/%d, smaller graph %d/%d, mean expansion reduction %.1f%%, "
                 "mean graph reduction %.1f%%, %.1f s;",
                 equal_cost, fewer_exp, both, smaller_graph, both, mean_red, mean_graph, elapsed) +
             per_seed;
  return v;
}

std::vector<std::int64_t> brute_sq_dist(const OccupancyGrid& g) {
  std::vector<CellIndex> obstacles;
  for (int i = 0; i < static_cast<int>(g.size()); ++i)
    if (g.at(i) != CellState::Free) obstacles.push_back(g.cell(i));
  std::vector<std::int64_t> d(g.size(), kInfiniteSqDist);
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    const CellIndex c = g.cell(i);
    for (const auto& o : obstacles) {
      const std::int64_t dd = std::int64_t(c.ix - o.ix) * (c.ix - o.ix) + std::int64_t(c.iy - o.iy) * (c.iy - o.iy);
      d[i] = std::min(d[i], dd);
    }
  }
  return d;
}

// 2. Distance map against brute force, incremental repair against rebuild.
Verdict gvd_exactness() {
  const auto t0 = Clock::now();
  int maps_ok = 0, deltas_ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = fixtures::random_grid(50, 50, 120, 1000 + seed);
    const GvdMap m = build_gvd(g);
    const auto oracle = brute_sq_dist(g);
    bool ok = true;
    for (int i = 0; i < static_cast<int>(g.size()); ++i) ok = ok && m.sq_dist(i) == oracle[i];
    maps_ok += ok;
  }
  auto g = fixtures::random_grid(50, 50, 120, 77);
  GvdMap m = build_gvd(g);
  std::mt19937_64 rng(2024);
  for (int step = 0; step < 30; ++step) {
    MapDelta d;
    std::set<int> used;
    const int n = 1 + static_cast<int>(rng() % 15);
    for (int k = 0; k < n; ++k) {
      const int i = static_cast<int>(rng() % g.size());
      if (!used.insert(i).second) continue;
      (g.at(i) == CellState::Occupied ? d.newly_freed : d.newly_occupied).push_back(g.cell(i));
    }
    for (const auto& c : d.newly_occupied) g.set(c, CellState::Occupied);
    for (const auto& c : d.newly_freed) g.set(c, CellState::Free);
    apply_delta(m, d);
    deltas_ok += m == build_gvd(g) && [&] {
      const auto oracle = brute_sq_dist(g);
      for (int i = 0; i < static_cast<int>(g.size()); ++i)
        if (m.sq_dist(i) != oracle[i]) return false;
      return true;
    }();
  }
  const double elapsed = seconds_since(t0);
  Verdict v;
  v.pass = maps_ok == 20 && deltas_ok == 30 && elapsed < 10.0;
  v.detail = fmt("distance maps exact %d/20, incremental == rebuild %d/30, %.2f s", maps_ok, deltas_ok, elapsed);
  return v;
}

// 3. Potential field properties on corridor cells of five maze fixtures.
Verdict field_properties() {
  std::size_t cells = 0, bad_range = 0, bad_one = 0, bad_zero = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    MazeSpec spec;
    spec.width = spec.height = 106;
    spec.seed = 50 + seed;
    const Maze maze = generate_maze(spec);
    const GvdMap gvd = build_gvd(maze.grid);
    const double r_c = 0.4 * std::sqrt(2.0);
    const VoronoiPath path = find_voronoi_path(gvd, world_to_cell(maze.grid, maze.start.position()),
                                               world_to_cell(maze.grid, maze.goal.position()), r_c);
    const VoronoiCorridor corr = build_corridor(gvd, path);
    const VoronoiField f = build_field(gvd, corr, 2.0 * r_c);
    for (int i = 0; i < static_cast<int>(gvd.size()); ++i) {
      if (!corr.contains(i)) continue;
      ++cells;
      const double rho = f.rho(i);
      if (!(rho >= 0.0 && rho <= 1.0)) ++bad_range;
      if ((rho == 1.0) != (f.d_o(i) == 0.0)) ++bad_one;
      if ((rho == 0.0) != (f.d_o(i) > f.d_o_min() || f.d_v(i) == 0.0)) ++bad_zero;
    }
  }
  const double spot = rho_v(0.4, 0.4, 0.8);
  Verdict v;
  v.pass = cells > 0 && bad_range == 0 && bad_one == 0 && bad_zero == 0 && std::abs(spot - 0.125) <= 1e-12;
  v.detail = fmt("%zu corridor cells: range violations %zu, rho=1 mismatches %zu, rho=0 mismatches %zu; "
                 "rho(d/2, d/2) = %.15f",
                 cells, bad_range, bad_one, bad_zero, spot);
  return v;
}

ReferencePath noisy_line(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-0.15, 0.15), clearance(0.3, 0.9);
  std::vector<Eigen::Vector2d> v;
  std::vector<double> d;
  for (int i = 0; i < n; ++i) {
    v.emplace_back(0.1 * i + jitter(rng), jitter(rng));
    d.push_back(clearance(rng));
  }
  return make_reference(v, d, 0.4);
}

// 4. Smoother: closed form, enumeration oracle, feasibility and safety, identity.
Verdict smoother_correctness() {
  ReferencePath three;
  three.vertices = {{0, 0}, {1, 1}, {2, 0}};
  three.clearances = {1.0, 1.0, 1.0};
  three.margins = {0.0, 5.0, 0.0};
  const SmoothedPath s3 = smooth(three);
  const double closed_err = std::max(std::abs(s3.vertices[1].x() - 1.0), std::abs(s3.vertices[1].y() - 1.0 / 41.0));

  std::mt19937_64 rng(3);
  int oracle_ok = 0;
  double oracle_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 6;
    const ReferencePath ref = noisy_line(n, rng);
    const SmoothedPath s = smooth(ref);
    const BoxQp qp = assemble_qp(ref, {});
    const Eigen::MatrixXd P(qp.P);
    // x and y coordinates decouple; enumerate each block.
    double err = 0.0;
    bool found = true;
    for (int dim = 0; dim < 2; ++dim) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i) idx.push_back(2 * i + dim);
      const auto o = qp_oracle::enumerate_active_sets(P(idx, idx), qp.q(idx), qp.lower(idx), qp.upper(idx));
      if (!o) {
        found = false;
        break;
      }
      for (int i = 0; i < n; ++i) err = std::max(err, std::abs(s.vertices[i][dim] - (*o)[i]));
    }
    if (!found) continue;
    oracle_err = std::max(oracle_err, err);
    oracle_ok += err <= 1e-6;
  }

  // Box and clearance on references sampled along Voronoi paths of maze fixtures.
  double box_err = 0.0, min_margin = std::numeric_limits<double>::infinity();
  std::size_t vertices = 0;
  const double r_c = 0.4 * std::sqrt(2.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    MazeSpec spec;
    spec.width = spec.height = 130;
    spec.seed = 300 + seed;
    const Maze maze = generate_maze(spec);
    const GvdMap gvd = build_gvd(maze.grid);
    const VoronoiPath vp = find_voronoi_path(gvd, world_to_cell(maze.grid, maze.start.position()),
                                             world_to_cell(maze.grid, maze.goal.position()), r_c);
    std::vector<Pose> poses;
    for (const auto& c : vp.cells) {
      const Eigen::Vector2d w = cell_to_world(maze.grid, c);
      poses.push_back({w.x(), w.y(), 0.0});
    }
    const ReferencePath ref = build_reference(poses, gvd, r_c);
    const SmoothedPath s = smooth(ref);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double dev = (s.vertices[i] - ref.vertices[i]).lpNorm<Eigen::Infinity>();
      box_err = std::max(box_err, dev - ref.margins[i]);
      min_margin = std::min(min_margin, clearance_at(gvd, world_to_cell(maze.grid, s.vertices[i])) - r_c);
      ++vertices;
    }
  }

  std::vector<Eigen::Vector2d> line;
  for (int i = 0; i < 40; ++i) line.emplace_back(0.2 + 0.1 * i, 0.5 + 0.03 * i);
  const ReferencePath straight = make_reference(line, std::vector<double>(40, 1.5), 0.4);
  const SmoothedPath ss = smooth(straight);
  double identity_err = 0.0;
  for (int i = 0; i < 40; ++i) identity_err = std::max(identity_err, (ss.vertices[i] - line[i]).norm());

  Verdict v;
  v.pass = closed_err <= 1e-6 && oracle_ok == 100 && box_err <= 1e-6 && min_margin >= 0.0 && identity_err <= 1e-8;
  v.detail = fmt("closed form error %.2e; oracle agreement %d/100 (max error %.2e); %zu maze vertices: box excess "
                 "%.2e m, min clearance - r_c %.3f m; straight identity error %.2e",
                 closed_err, oracle_ok, oracle_err, vertices, box_err, min_margin, identity_err);
  return v;
}

// 5. Median smoothing time for a 400-vertex reference.
Verdict smoother_speed() {
  std::vector<Eigen::Vector2d> v;
  std::vector<double> d;
  for (int i = 0; i < 400; ++i) {
    const double s = 0.1 * i;
    v.emplace_back(s, 0.8 * std::sin(0.35 * s) + ((i % 2) ? 0.04 : -0.04));
    d.push_back(0.75 + 0.15 * std::cos(0.5 * s));
  }
  const ReferencePath ref = make_reference(v, d, 0.4);
  std::vector<double> ms;
  SolveStatus status = SolveStatus::Solved;
  for (int rep = 0; rep < 20; ++rep) {
    const auto t0 = Clock::now();
    const SmoothedPath s = smooth(ref);
    ms.push_back(1e3 * seconds_since(t0));
    if (s.status != SolveStatus::Solved) status = s.status;
  }
  std::nth_element(ms.begin(), ms.begin() + 10, ms.end());
  const double hi = ms[10];
  std::nth_element(ms.begin(), ms.begin() + 9, ms.end());
  const double median = 0.5 * (ms[9] + hi);
  Verdict r;
  r.pass = median < 5.0 && status == SolveStatus::Solved;
  r.detail = fmt("n = 400, median %.3f ms over 20 runs, solver %s", median,
                 status == SolveStatus::Solved ? "converged" : "hit the iteration limit");
  return r;
}

std::vector<Eigen::Vector2d> random_path(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> turn(-0.6, 0.6), step(0.1, 0.5);
  std::uniform_int_distribution<int> count(3, 30);
  std::vector<Eigen::Vector2d> v{{0.0, 0.0}};
  double heading = 0.0;
  const int n = count(rng);
  for (int i = 1; i < n; ++i) {
    heading += turn(rng);
    v.push_back(v.back() + step(rng) * Eigen::Vector2d(std::cos(heading), std::sin(heading)));
  }
  return v;
}

bool profile_violates(const VelocityProfile& p, double scale) {
  for (std::size_t k = 0; k < p.samples.size(); ++k) {
    const double v = scale * p.samples[k].v;
    if (v > p.cap(k) + 1e-12 || v < 0.0) return true;
    if (k + 1 < p.samples.size()) {
      const double w = scale * p.samples[k + 1].v;
      const double ds = p.samples[k + 1].s - p.samples[k].s;
      if (std::abs(w * w - v * v) > 2.0 * p.limits.a_max * ds + 1e-12) return true;
    }
  }
  return false;
}

// 6. Velocity profile feasibility, maximality and the trapezoid oracle.
Verdict velocity_profile() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> vmax(0.5, 2.0), omega(0.3, 2.0), acc(0.3, 2.0);
  int feasible = 0, maximal = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const PathSpline s = fit_spline(random_path(rng));
    const VelocityLimits lim{vmax(rng), omega(rng), acc(rng)};
    const VelocityProfile p = plan_velocity(s, lim, 0.0, 0.0, 0.1);
    bool spacing = true;
    for (std::size_t k = 0; k + 1 < p.samples.size(); ++k)
      spacing = spacing && p.samples[k + 1].s - p.samples[k].s <= 0.1 + 1e-12;
    feasible += spacing && !profile_violates(p, 1.0) && p.samples.front().v == 0.0 && p.samples.back().v == 0.0;
    maximal += profile_violates(p, 1.01);
  }
  std::vector<Eigen::Vector2d> line;
  for (int i = 0; i <= 100; ++i) line.emplace_back(0.1 * i, 0.0);
  const PathSpline straight = fit_spline(line);
  const VelocityProfile tp = plan_velocity(straight, {1.5, 1.0, 1.0}, 0.0, 0.0, 0.1);
  const double T = compute_metrics(straight, tp, 0.1).T;
  const double analytic = 2.0 * 1.5 / 1.0 + (10.0 - 2.0 * 1.5 * 1.5 / 2.0) / 1.5;
  const double rel = std::abs(T - analytic) / analytic;
  Verdict v;
  v.pass = feasible == 50 && maximal == 50 && rel <= 0.01;
  v.detail = fmt("feasible %d/50, maximal under 1.01x scaling %d/50, straight 10 m T = %.4f s vs analytic %.4f s "
                 "(%.2f%%)",
                 feasible, maximal, T, analytic, 100.0 * rel);
  return v;
}

// 7. Curvature metrics on the circle and straight fixtures.
Verdict curvature_metrics() {
  std::vector<Eigen::Vector2d> circle;
  for (int i = 0; i < 4; ++i) {
    const double t = i * std::numbers::pi / 6.0;
    circle.emplace_back(2.0 * std::cos(t), 2.0 * std::sin(t));
  }
  const PathSpline c = fit_spline(circle);
  const PathMetrics mc = compute_metrics(c, plan_velocity(c, {1.5, 1.0, 1.0}, 0.0, 0.0, 0.1), 0.1);
  std::vector<Eigen::Vector2d> line{{0, 0}, {0.5, 0.5}, {1, 1}, {1.5, 1.5}};
  const PathSpline l = fit_spline(line);
  const PathMetrics ml = compute_metrics(l, plan_velocity(l, {1.5, 1.0, 1.0}, 0.0, 0.0, 0.1), 0.1);
  Verdict v;
  v.pass = std::abs(mc.K_max - 0.5) <= 0.02 && std::abs(mc.K_mean - 0.5) <= 0.02 && ml.K_max == 0.0 &&
           ml.K_mean == 0.0;
  v.detail = fmt("circle (4 knots, 30 deg apart, r = 2 m): K_max %.4f, K_mean %.4f; straight: K_max %g, K_mean %g",
                 mc.K_max, mc.K_mean, ml.K_max, ml.K_mean);
  return v;
}

// L-shaped hall, 2 m wide, turning left from east to north.
OccupancyGrid corner_fixture() {
  OccupancyGrid g(80, 80, 0.1, Eigen::Vector2d::Zero(), CellState::Occupied);
  for (int y = 10; y < 30; ++y)
    for (int x = 10; x < 70; ++x) g.set({x, y}, CellState::Free);
  for (int y = 10; y < 70; ++y)
    for (int x = 50; x < 70; ++x) g.set({x, y}, CellState::Free);
  return g;
}

// 8. Field cost and deviation penalty keep the path further from the corner.
Verdict safety_regression() {
  const OccupancyGrid g = corner_fixture();
  Scenario sc;
  sc.start = {1.55, 2.05, 0.0};
  sc.goal = {6.05, 6.45, std::numbers::pi / 2};
  const PlanningContext ctx = make_context(g, sc.footprint_half());
  const PlanOutcome with_field = plan_end_to_end(sc, ctx);
  Scenario plain = sc;
  plain.flat_field = true;
  plain.w_r = 0.0;
  const PlanOutcome without = plan_end_to_end(plain, ctx);
  const double a = with_field.min_clearance, b = without.min_clearance;
  const double gain = b > 0.0 ? 100.0 * (a / b - 1.0) : 0.0;
  Verdict v;
  v.pass = a > b && gain >= 10.0;
  v.detail = fmt("min clearance %.3f m with field and w_r = 1, %.3f m with rho = 0 and w_r = 0 (%+.1f%%)", a, b, gain);
  return v;
}

std::vector<std::string> non_timing_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    // Timing columns are the last two.
    for (int k = 0; k < 2; ++k) line = line.substr(0, line.rfind(','));
    rows.push_back(line);
  }
  return rows;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 9. Two benchmark runs with the same seed agree outside the timing columns.
Verdict determinism(const std::string& cli) {
  std::vector<std::string> a, b;
  std::string how;
  if (!cli.empty()) {
    const fs::path dir = fs::temp_directory_path() / "g2vd_acceptance_bench";
    fs::remove_all(dir);
    int rc = 0;
    for (const char* run : {"a", "b"}) {
      const std::string cmd = "\"" + cli + "\" bench --seed 0 --mazes 3 --mode both --reps 2 --out-dir \"" +
                              (dir / run).string() + "\" > /dev/null";
      rc |= std::system(cmd.c_str());
    }
    if (rc != 0) return {false, "bench command failed"};
    a = non_timing_rows(read_file(dir / "a" / "benchmark.csv"));
    b = non_timing_rows(read_file(dir / "b" / "benchmark.csv"));
    how = "g2vd_cli bench twice";
  } else {
    auto once = [] {
      std::vector<Scenario> scenarios;
      std::vector<PlanningContext> contexts;
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        MazeSpec spec;
        spec.seed = seed;
        const Maze maze = generate_maze(spec);
        Scenario sc;
        sc.name = "maze" + std::to_string(seed);
        sc.start = maze.start;
        sc.goal = maze.goal;
        contexts.push_back(make_context(maze.grid, sc.footprint_half()));
        scenarios.push_back(sc);
      }
      std::vector<const PlanningContext*> ptrs;
      for (const auto& c : contexts) ptrs.push_back(&c);
      std::ostringstream out;
      write_benchmark_csv(run_benchmark(scenarios, ptrs, 2), out);
      return out.str();
    };
    a = non_timing_rows(once());
    b = non_timing_rows(once());
    how = "run_benchmark twice";
  }
  Verdict v;
  v.pass = a.size() > 1 && a == b;
  v.detail = fmt("%s: %zu rows each, non-timing columns %s", how.c_str(), a.empty() ? 0 : a.size() - 1,
                 a == b ? "identical" : "differ");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::string report_path;
  bool strict = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) cli = argv[++i];
    else if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (arg == "--report" && i + 1 < argc) report_path = argv[++i];
    else if (arg == "--strict") strict = true;
    else {
      std::cerr << "usage: acceptance [--cli <g2vd_cli>] [--only N] [--report FILE] [--strict]\n";
      return 2;
    }
  }
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {"corridor benefit", corridor_benefit},
      {"gvd exactness", gvd_exactness},
      {"voronoi field", field_properties},
      {"smoother correctness", smoother_correctness},
      {"smoother speed", smoother_speed},
      {"velocity profile", velocity_profile},
      {"curvature metrics", curvature_metrics},
      {"safety regression", safety_regression},
      {"determinism", [&] { return determinism(cli); }},
  };
  int failures = 0;
  std::ostringstream report;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && only != static_cast<int>(i + 1)) continue;
    Verdict v;
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    const std::string line = std::string(v.pass ? "PASS" : "FAIL") + "  " + std::to_string(i + 1) + ". " +
                             criteria[i].name + ": " + v.detail;
    std::cout << line << std::endl;
    report << line << '\n';
  }
  const std::string summary =
      failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed");
  std::cout << summary << std::endl;
  report << summary << '\n';
  if (!report_path.empty()) std::ofstream(report_path) << report.str();
  return strict && failures ? 1 : 0;
}
