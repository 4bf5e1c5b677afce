#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "g2vd/gvd.hpp"
#include "g2vd/primitives.hpp"

namespace g2vd {

/// Resampled search path handed to the smoother. `margins` are the bubble
/// half-sides b_i = (sqrt(2)/2) d_i - r_c, clipped at zero.
struct ReferencePath {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<double> clearances;
  std::vector<double> margins;
  double r_c = 0.0;

  std::size_t size() const { return vertices.size(); }
};

/// Optimization margin for a vertex with clearance d.
inline double bubble_margin(double clearance, double r_c) {
  const double half_side = 0.5 * std::sqrt(2.0) * clearance;
  return half_side > r_c ? half_side - r_c : 0.0;
}

struct ReferenceOptions {
  double spacing = 0.1;
  /// Throw when a vertex has clearance below r_c. When false such vertices are
  /// kept with a zero margin (frozen at the reference).
  bool reject_tight = true;
};

/// Arc-length resampling (both endpoints kept) with clearances looked up in
/// the GVD. Requires arc length >= 2 * spacing.
ReferencePath build_reference(const std::vector<Pose>& path, const GvdMap& gvd, double r_c,
                              const ReferenceOptions& options = {});

/// Builds a reference path from raw vertices and clearances.
ReferencePath make_reference(std::vector<Eigen::Vector2d> vertices, std::vector<double> clearances, double r_c);

struct SmootherConfig {
  double w_s = 10.0;
  double w_r = 1.0;
  double tolerance = 1e-6;
  int max_iterations = 4000;
  double penalty = 1.0;
  double relaxation = 1.6;
  int rescale_interval = 25;
};

/// min 1/2 x'Px + q'x subject to lower <= x <= upper.
struct BoxQp {
  Eigen::SparseMatrix<double> P;
  Eigen::VectorXd q;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index dimension() const { return q.size(); }
  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(P * x) + q.dot(x); }
};

/// Quadratic program of the smoothing objective over x = [x1 y1 x2 y2 ...]:
/// P = 2(w_s D'D + w_r I), q = -2 w_r x_ref, bubble bounds, fixed endpoints.
BoxQp assemble_qp(const ReferencePath& ref, const SmootherConfig& cfg);

enum class SolveStatus { Solved, MaxIterations };

struct BoxQpResult {
  Eigen::VectorXd x;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  double bound_violation = 0.0;
  /// ||x - clamp(x - (Px + q))||_inf.
  double projected_gradient = 0.0;
  bool polished = false;
  /// Objective of the feasible iterate after each ADMM iteration.
  std::vector<double> objective_history;
};

/// Projected-gradient optimality measure at a feasible point.
double projected_gradient_norm(const BoxQp& qp, const Eigen::VectorXd& x);

/// ADMM on the box-constrained QP with over-relaxation and residual balancing;
/// the active set of the iterate is polished with an exact reduced solve.
/// Throws NumericError on non-finite input.
BoxQpResult solve_box_qp(const BoxQp& qp, const SmootherConfig& cfg = {},
                         const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

struct SmoothedPath {
  std::vector<Eigen::Vector2d> vertices;
  SolveStatus status = SolveStatus::Solved;
  int iterations = 0;
  double projected_gradient = 0.0;
  double objective = 0.0;
  double reference_objective = 0.0;
  double wall_time = 0.0;
};

/// Smoothing objective w_s sum ||x_{i+1} - 2 x_i + x_{i-1}||^2 + w_r sum ||x_i - x_ref_i||^2.
double smoothing_objective(const ReferencePath& ref, const SmootherConfig& cfg,
                           const std::vector<Eigen::Vector2d>& vertices);

SmoothedPath smooth(const ReferencePath& ref, const SmootherConfig& cfg = {});

/// `x y` per line.
void write_path_xy(const std::vector<Eigen::Vector2d>& vertices, std::ostream& out);

}  // namespace g2vd
