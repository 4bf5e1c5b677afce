#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "g2vd/error.hpp"
#include "g2vd/pipeline.hpp"

namespace fs = std::filesystem;
using namespace g2vd;

namespace {

constexpr int kExitPlanning = 2;
constexpr int kExitInput = 3;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw RangeError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

int cmd_plan(const fs::path& scenario_path, const std::optional<fs::path>& map, const std::optional<std::string>& mode,
             const fs::path& out_dir, std::optional<double> local_length) {
  Scenario sc = load_scenario(scenario_path);
  if (map) sc.map = *map;
  if (mode) sc.mode = parse_mode(*mode);
  if (local_length) sc.local_length = *local_length;
  const OccupancyGrid grid = load_map(sc.map);
  const PlanningContext ctx = make_context(grid, sc.footprint_half());
  const PlanOutcome o = plan_end_to_end(sc, ctx);

  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "search_path.txt");
    write_pose_list(o.search.path, out);
  }
  {
    auto out = open_out(out_dir / "smoothed_path.txt");
    write_path_xy(o.smoothed.vertices, out);
  }
  {
    auto out = open_out(out_dir / "search_metrics.csv");
    write_search_metrics_csv(o.search, out);
  }
  {
    auto out = open_out(out_dir / "profile.csv");
    write_profile_csv(o.profile, out);
  }
  {
    auto out = open_out(out_dir / "metrics.csv");
    write_metrics_csv(o.metrics, out);
  }
  SvgScene scene;
  scene.grid = &grid;
  scene.gvd = &ctx.gvd;
  scene.corridor = sc.mode == PlannerMode::Corridor ? &o.corridor : nullptr;
  scene.searched = o.search.path;
  scene.smoothed = o.smoothed.vertices;
  for (std::size_t i = 0; i < o.search.path.size(); i += 10) scene.footprints.push_back(o.search.path[i]);
  scene.footprint_half = sc.footprint_half();
  write_text(out_dir / "plan.svg", render_svg(scene));

  std::cout << "mode " << mode_name(sc.mode) << ": cost " << o.search.cost << ", expansions " << o.search.expansions
            << ", graph size " << o.search.graph_size << ", search " << o.timings.search_ms << " ms, smoothing "
            << o.timings.smooth_ms << " ms\n"
            << "S " << o.metrics.S << " m, T " << o.metrics.T << " s, K_max " << o.metrics.K_max << ", K_mean "
            << o.metrics.K_mean << ", min clearance " << o.min_clearance << " m\n";
  return 0;
}

int cmd_bench(const std::vector<fs::path>& scenario_paths, const std::string& mode, std::uint64_t seed, int mazes,
              int reps, const fs::path& out_dir) {
  std::vector<PlannerMode> modes;
  if (mode == "both") {
    modes = {PlannerMode::Corridor, PlannerMode::FullSpace};
  } else {
    modes = {parse_mode(mode)};
  }
  BenchmarkReport report;
  if (!scenario_paths.empty()) {
    std::vector<Scenario> scenarios;
    for (const auto& p : scenario_paths) {
      const Scenario base = load_scenario(p);
      for (PlannerMode m : modes) {
        Scenario sc = base;
        sc.mode = m;
        scenarios.push_back(sc);
      }
    }
    report = run_benchmark(scenarios, reps);
  } else {
    std::vector<PlanningContext> contexts;
    std::vector<Scenario> scenarios;
    contexts.reserve(mazes);
    for (int k = 0; k < mazes; ++k) {
      MazeSpec spec;
      spec.seed = seed + static_cast<std::uint64_t>(k);
      const Maze maze = generate_maze(spec);
      contexts.push_back(make_context(maze.grid, kDefaultFootprintHalf));
      for (PlannerMode m : modes) {
        Scenario sc;
        sc.name = "maze" + std::to_string(spec.seed);
        sc.start = maze.start;
        sc.goal = maze.goal;
        sc.seed = spec.seed;
        sc.mode = m;
        scenarios.push_back(sc);
      }
    }
    std::vector<const PlanningContext*> ctx_ptrs;
    for (std::size_t i = 0; i < scenarios.size(); ++i) ctx_ptrs.push_back(&contexts[i / modes.size()]);
    report = run_benchmark(scenarios, ctx_ptrs, reps);
  }
  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "benchmark.csv");
    write_benchmark_csv(report, out);
  }
  write_benchmark_summary(report, std::cout);
  return 0;
}

int cmd_gen_maze(const MazeSpec& spec, const fs::path& out_dir) {
  const Maze maze = generate_maze(spec);
  fs::create_directories(out_dir);
  const std::string stem = "maze" + std::to_string(spec.seed);
  save_map(maze.grid, out_dir / (stem + ".pgm"));
  Scenario sc;
  sc.name = stem;
  sc.map = stem + ".pgm";
  sc.start = maze.start;
  sc.goal = maze.goal;
  sc.seed = spec.seed;
  auto out = open_out(out_dir / (stem + ".scenario"));
  write_scenario(sc, out);
  std::cout << "wrote " << (out_dir / (stem + ".pgm")).string() << " and " << (out_dir / (stem + ".scenario")).string()
            << '\n';
  return 0;
}

int cmd_gen_prims(double resolution, double footprint_half, bool backward, const fs::path& out_path) {
  PrimitiveConfig cfg;
  cfg.allow_backward = backward;
  const PrimitiveSet set = generate_primitives(resolution, footprint_half, cfg);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  save_primitives(set, out_path);
  std::cout << "wrote " << set.primitives.size() << " primitives to " << out_path.string() << '\n';
  return 0;
}

int cmd_dump_gvd(const fs::path& map, const fs::path& out_dir) {
  const OccupancyGrid grid = load_map(map);
  const GvdMap gvd = build_gvd(grid);
  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "gvd.csv");
    write_gvd_csv(gvd, out);
  }
  SvgScene scene;
  scene.grid = &grid;
  scene.gvd = &gvd;
  write_text(out_dir / "gvd.svg", render_svg(scene));
  std::cout << gvd.voronoi_count() << " Voronoi cells\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voronoi-corridor lattice planner with QP smoothing and velocity profiling"};
  app.require_subcommand(1);

  fs::path scenario_path, out_dir = "out";
  std::optional<fs::path> map;
  std::optional<std::string> mode;
  std::optional<double> local_length;
  auto* plan = app.add_subcommand("plan", "Plan one scenario; writes SVG and CSV outputs");
  plan->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  plan->add_option("--map", map, "Override the scenario map");
  plan->add_option("--mode", mode, "corridor or full")->check(CLI::IsMember({"corridor", "full"}));
  plan->add_option("--out-dir", out_dir, "Output directory");
  plan->add_option("--local-length", local_length, "Truncate the searched path before smoothing (m)");
  std::uint64_t plan_seed = 0;
  plan->add_option("--seed", plan_seed, "Recorded only; planning is deterministic");

  std::vector<fs::path> bench_scenarios;
  std::string bench_mode = "both";
  std::uint64_t seed = 0;
  int mazes = 10, reps = 1;
  auto* bench = app.add_subcommand("bench", "Run scenarios (or generated mazes) and write benchmark.csv");
  bench->add_option("--scenario", bench_scenarios, "Scenario files; generated mazes when omitted")
      ->check(CLI::ExistingFile);
  bench->add_option("--mode", bench_mode, "corridor, full or both")
      ->check(CLI::IsMember({"corridor", "full", "both"}));
  bench->add_option("--seed", seed, "First maze seed");
  bench->add_option("--mazes", mazes, "Number of generated mazes")->check(CLI::NonNegativeNumber);
  bench->add_option("--reps", reps, "Repetitions per scenario")->check(CLI::NonNegativeNumber);
  bench->add_option("--out-dir", out_dir, "Output directory");

  MazeSpec maze;
  auto* gen_maze = app.add_subcommand("gen-maze", "Generate a maze map and matching scenario");
  gen_maze->add_option("--seed", maze.seed, "Random seed");
  gen_maze->add_option("--width", maze.width, "Width in cells");
  gen_maze->add_option("--height", maze.height, "Height in cells");
  gen_maze->add_option("--corridor-width", maze.corridor_width, "Corridor width in cells");
  gen_maze->add_option("--wall-width", maze.wall_width, "Wall width in cells (0: corridor width)");
  gen_maze->add_option("--resolution", maze.resolution, "Meters per cell");
  gen_maze->add_option("--out-dir", out_dir, "Output directory");

  double resolution = 0.1, footprint = kDefaultFootprintHalf;
  bool backward = false;
  fs::path prims_out = "primitives.txt";
  auto* gen_prims = app.add_subcommand("gen-prims", "Generate the motion primitive set");
  gen_prims->add_option("--resolution", resolution, "Meters per cell");
  gen_prims->add_option("--footprint", footprint, "Half side of the square footprint (m)");
  gen_prims->add_flag("--backward", backward, "Include backward primitives");
  gen_prims->add_option("--out", prims_out, "Output file");

  fs::path gvd_map;
  auto* dump_gvd = app.add_subcommand("dump-gvd", "Write the distance map and Voronoi cells of a map");
  dump_gvd->add_option("--map", gvd_map, "PGM map")->required()->check(CLI::ExistingFile);
  dump_gvd->add_option("--out-dir", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*plan) return cmd_plan(scenario_path, map, mode, out_dir, local_length);
    if (*bench) return cmd_bench(bench_scenarios, bench_mode, seed, mazes, reps, out_dir);
    if (*gen_maze) return cmd_gen_maze(maze, out_dir);
    if (*gen_prims) return cmd_gen_prims(resolution, footprint, backward, prims_out);
    if (*dump_gvd) return cmd_dump_gvd(gvd_map, out_dir);
  } catch (const PlanningError& e) {
    std::cerr << "planning failed: " << e.what() << '\n';
    return kExitPlanning;
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
