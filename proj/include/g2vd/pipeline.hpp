#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "g2vd/corridor.hpp"
#include "g2vd/field.hpp"
#include "g2vd/gvd.hpp"
#include "g2vd/lattice.hpp"
#include "g2vd/primitives.hpp"
#include "g2vd/smoother.hpp"
#include "g2vd/trajectory.hpp"

namespace g2vd {

enum class PlannerMode { Corridor, FullSpace };

const char* mode_name(PlannerMode mode);
PlannerMode parse_mode(const std::string& text);

inline constexpr double kDefaultFootprintHalf = 0.4;

struct Scenario {
  std::string name;
  std::filesystem::path map;
  Pose start;
  Pose goal;
  VelocityLimits limits;
  /// Circumscribed radius of the square footprint.
  double r_c = kDefaultFootprintHalf * 1.4142135623730951;
  /// <= 0 selects 2 * r_c.
  double d_o_min = 0.0;
  double w_s = 10.0;
  double w_r = 1.0;
  std::uint64_t seed = 0;
  PlannerMode mode = PlannerMode::Corridor;
  /// Truncate the searched path to this arc length before smoothing; 0 disables.
  double local_length = 0.0;
  /// Force the Voronoi potential to zero in the search cost.
  bool flat_field = false;

  double footprint_half() const { return r_c / 1.4142135623730951; }
  double effective_d_o_min() const { return d_o_min > 0.0 ? d_o_min : 2.0 * r_c; }
};

/// `key: value` lines; `#` starts a comment. Poses are `x y theta`. A relative
/// map path is resolved against `base_dir`.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
void write_scenario(const Scenario& scenario, std::ostream& out);

struct StageTimings {
  double corridor_ms = 0.0;
  double field_ms = 0.0;
  double search_ms = 0.0;
  double smooth_ms = 0.0;
  double velocity_ms = 0.0;
};

struct PlanOutcome {
  VoronoiCorridor corridor;
  VoronoiField field;
  SearchResult search;
  ReferencePath reference;
  SmoothedPath smoothed;
  PathSpline spline;
  VelocityProfile profile;
  PathMetrics metrics;
  StageTimings timings;
  /// Smallest clearance_at over the smoothed vertices.
  double min_clearance = 0.0;
};

/// Resources shared by repeated runs on one map.
struct PlanningContext {
  GvdMap gvd;
  PrimitiveSet primitives;
};

PlanningContext make_context(const OccupancyGrid& grid, double footprint_half);

/// Runs corridor, field, search, smoothing and velocity stages in order. Stage
/// errors are rethrown with the stage name prefixed and their category kept.
PlanOutcome plan_end_to_end(const Scenario& scenario, const PlanningContext& context);
PlanOutcome plan_end_to_end(const Scenario& scenario);

struct BenchmarkRow {
  std::string scenario;
  PlannerMode mode = PlannerMode::Corridor;
  int repetition = 0;
  bool success = false;
  std::string error;
  std::size_t expansions = 0;
  std::size_t graph_size = 0;
  double path_cost = 0.0;
  PathMetrics metrics;
  double search_ms = 0.0;
  double smooth_ms = 0.0;
};

struct TimingStats {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

TimingStats timing_stats(const std::vector<double>& samples);

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  TimingStats search_ms;
  TimingStats smooth_ms;
  /// Mean over paired corridor/full rows of 100 * (1 - corridor / full).
  std::optional<double> expansion_reduction_pct;
  std::optional<double> graph_size_reduction_pct;
};

/// Every scenario `repetitions` times; failures are recorded per row.
BenchmarkReport run_benchmark(const std::vector<Scenario>& scenarios, int repetitions);
/// Scenarios on preloaded maps (same order as `scenarios`), sharing contexts.
BenchmarkReport run_benchmark(const std::vector<Scenario>& scenarios, const std::vector<const PlanningContext*>& contexts,
                              int repetitions);

/// Deterministic columns first, wall-clock columns last.
void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out);
void write_benchmark_summary(const BenchmarkReport& report, std::ostream& out);

struct MazeSpec {
  int width = 200;
  int height = 200;
  int corridor_width = 14;
  /// <= 0 selects corridor_width.
  int wall_width = 10;
  std::uint64_t seed = 0;
  double resolution = 0.1;
  double loop_fraction = 0.1;
};

struct Maze {
  OccupancyGrid grid;
  /// Centers of the first and last maze cells.
  Pose start;
  Pose goal;
};

/// Randomized depth-first carving followed by removal of a fraction of the
/// remaining interior walls.
Maze generate_maze(const MazeSpec& spec);
OccupancyGrid generate_maze(int width, int height, int corridor_width, std::uint64_t seed);

struct SvgScene {
  const OccupancyGrid* grid = nullptr;
  const GvdMap* gvd = nullptr;
  const VoronoiCorridor* corridor = nullptr;
  std::vector<Pose> searched;
  std::vector<Eigen::Vector2d> smoothed;
  /// Poses at which the footprint square is drawn.
  std::vector<Pose> footprints;
  double footprint_half = 0.0;
};

std::string render_svg(const SvgScene& scene);

}  // namespace g2vd
