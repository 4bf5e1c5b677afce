#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "g2vd/grid_map.hpp"

namespace g2vd {

inline constexpr int kNumHeadings = 16;

/// Robot pose; theta in [0, 2*pi).
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

double normalize_angle(double theta);
/// Signed smallest rotation taking `from` to `to`, in (-pi, pi].
double angle_diff(double to, double from);

/// Integer lattice direction of a heading index; one of the 16 primitive
/// vectors with |i|, |j| <= 2.
CellIndex heading_vector(int heading);
/// atan2 of the heading's lattice direction, in [0, 2*pi).
double heading_angle(int heading);
/// Heading index whose angle is closest to `theta`.
int nearest_heading(double theta);

enum class PrimitiveKind { Straight, Curved, Rotation, Backward };

/// A motion primitive expressed at the origin: poses start at
/// (0, 0, heading_angle(start_heading)) and the last pose lands on a cell
/// center (`end_offset` cells away). `swath` lists the cell offsets covered by
/// the footprint along the motion.
struct MotionPrimitive {
  int start_heading = 0;
  int end_heading = 0;
  PrimitiveKind kind = PrimitiveKind::Straight;
  std::vector<Pose> poses;
  std::vector<CellIndex> swath;
  CellIndex end_offset;
  double length = 0.0;
  double delta_theta = 0.0;

  std::size_t n() const { return poses.size(); }
  std::string name() const;
  friend bool operator==(const MotionPrimitive&, const MotionPrimitive&) = default;
};

struct PrimitiveConfig {
  /// Straight primitives, as multiples of the heading's lattice vector.
  std::vector<int> straight_multiples{1, 3};
  /// Chord length range (cells) for the one-step turning primitives.
  double curve_min_cells = 3.0;
  double curve_max_cells = 6.0;
  /// Upper bound on |curvature| along curved primitives, 1/m.
  double max_curvature = 6.0;
  /// Arc spacing of interior poses; <= 0 selects resolution / 2.
  double pose_spacing = 0.0;
  bool allow_backward = false;
};

struct PrimitiveSet {
  double resolution = 0.0;
  int num_headings = kNumHeadings;
  /// Half side of the square footprint, meters.
  double footprint = 0.0;
  /// Circumscribed radius, footprint * sqrt(2).
  double r_c = 0.0;
  std::vector<MotionPrimitive> primitives;
  /// Indices into `primitives` per start heading.
  std::array<std::vector<std::size_t>, kNumHeadings> by_heading;

  void index();
  friend bool operator==(const PrimitiveSet& a, const PrimitiveSet& b) {
    return a.resolution == b.resolution && a.num_headings == b.num_headings &&
           a.footprint == b.footprint && a.primitives == b.primitives;
  }
};

/// Quintic Bezier through `p0` -> `p5` leaving along `theta0` and arriving along
/// `theta1` with zero end curvature. Control points as columns.
Eigen::Matrix<double, 2, 6> turning_bezier(const Eigen::Vector2d& p0, double theta0,
                                           const Eigen::Vector2d& p5, double theta1);
Eigen::Vector2d bezier_point(const Eigen::Matrix<double, 2, 6>& ctrl, double t);
Eigen::Vector2d bezier_derivative(const Eigen::Matrix<double, 2, 6>& ctrl, double t);
Eigen::Vector2d bezier_second_derivative(const Eigen::Matrix<double, 2, 6>& ctrl, double t);

PrimitiveSet generate_primitives(double resolution, double footprint_half_width,
                                 const PrimitiveConfig& config = {});

/// Cells overlapped (with positive area) by the square footprint swept along
/// the primitive, as offsets from the start cell. Sorted, unique.
std::vector<CellIndex> compute_swath(const MotionPrimitive& prim, double footprint_half_width,
                                     double resolution);

/// Footprint cells for poses given relative to the center of cell (0,0).
std::vector<CellIndex> sweep_footprint(const std::vector<Pose>& poses, double footprint_half_width,
                                       double resolution);

void save_primitives(const PrimitiveSet& set, std::ostream& out);
void save_primitives(const PrimitiveSet& set, const std::filesystem::path& path);
PrimitiveSet load_primitives(std::istream& in);
PrimitiveSet load_primitives(const std::filesystem::path& path);

}  // namespace g2vd
