#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace g2vd {

/// Cubic interpolant of (x(u), y(u)) over a chord-length parameter u, with
/// not-a-knot end conditions (three knots give the interpolating parabola).
class PathSpline {
 public:
  PathSpline() = default;

  const std::vector<Eigen::Vector2d>& knots() const { return knots_; }
  const std::vector<double>& params() const { return u_; }
  std::size_t segments() const { return coeffs_.size(); }
  double max_param() const { return u_.back(); }
  /// Total arc length in meters.
  double length() const { return cum_length_.back(); }

  Eigen::Vector2d point(double u) const;
  Eigen::Vector2d d1(double u) const;
  Eigen::Vector2d d2(double u) const;

  /// Arc length from u = 0.
  double arc_length_to(double u) const;
  /// Inverse of arc_length_to, clamped to [0, length()].
  double param_at_length(double s) const;

 private:
  friend PathSpline fit_spline(const std::vector<Eigen::Vector2d>& vertices);

  std::size_t segment_of(double u) const;
  double segment_length(std::size_t k, double t0, double t1) const;

  std::vector<Eigen::Vector2d> knots_;
  std::vector<double> u_;
  // Rows: constant, linear, quadratic, cubic coefficients in t = u - u_k.
  std::vector<Eigen::Matrix<double, 4, 2>> coeffs_;
  std::vector<double> cum_length_;
};

/// Throws PreconditionError with fewer than three vertices and DomainError on
/// coincident consecutive vertices.
PathSpline fit_spline(const std::vector<Eigen::Vector2d>& vertices);

/// Unsigned curvature; DomainError where the parametric speed vanishes.
double curvature_at(const PathSpline& spline, double u);

struct VelocityLimits {
  double v_max = 1.5;
  double omega_max = 1.0;
  double a_max = 1.0;
};

struct VelocitySample {
  double s = 0.0;
  double v = 0.0;
  double kappa = 0.0;
};

struct VelocityProfile {
  std::vector<VelocitySample> samples;
  VelocityLimits limits;
  double v_start = 0.0;
  double v_end = 0.0;

  /// min(v_max, omega_max / |kappa|) at sample k.
  double cap(std::size_t k) const;
};

/// Maximal profile under speed, curvature-coupled angular speed and
/// acceleration limits, from a forward and a backward pass. Samples are
/// uniform with spacing at most ds. Throws PlanningError naming the end
/// whose boundary speed cannot be met.
VelocityProfile plan_velocity(const PathSpline& spline, const VelocityLimits& limits, double v_start,
                              double v_end, double ds);

struct PathMetrics {
  double S = 0.0;
  double T = 0.0;
  double K_max = 0.0;
  double K_mean = 0.0;
};

/// Traversal time sum 2 ds / (v_k + v_{k+1}) plus curvature statistics over
/// samples spaced ds / 4.
PathMetrics compute_metrics(const PathSpline& spline, const VelocityProfile& profile, double ds);

/// `s,v,t_cumulative`.
void write_profile_csv(const VelocityProfile& profile, std::ostream& out);
/// `S,T,K_max,K_mean`.
void write_metrics_csv(const PathMetrics& metrics, std::ostream& out, bool header = true);

}  // namespace g2vd
