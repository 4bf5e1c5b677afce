#include "g2vd/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "g2vd/error.hpp"

namespace g2vd {

namespace {

constexpr double kGaussNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                   0.9061798459386640};
constexpr double kGaussWeights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};

template <typename F>
double gauss5(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) sum += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
  return half * sum;
}

template <typename F>
double adaptive_gauss5(const F& f, double a, double b, double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss5(f, a, mid);
  const double right = gauss5(f, mid, b);
  if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
  return adaptive_gauss5(f, a, mid, left, 0.5 * tol, depth - 1) +
         adaptive_gauss5(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

std::size_t PathSpline::segment_of(double u) const {
  const auto it = std::upper_bound(u_.begin(), u_.end(), u);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - u_.begin() - 1));
  return std::min(k, coeffs_.size() - 1);
}

Eigen::Vector2d PathSpline::point(double u) const {
  const std::size_t k = segment_of(u);
  const double t = u - u_[k];
  const auto& c = coeffs_[k];
  return (c.row(0) + t * (c.row(1) + t * (c.row(2) + t * c.row(3)))).transpose();
}

Eigen::Vector2d PathSpline::d1(double u) const {
  const std::size_t k = segment_of(u);
  const double t = u - u_[k];
  const auto& c = coeffs_[k];
  return (c.row(1) + t * (2.0 * c.row(2) + 3.0 * t * c.row(3))).transpose();
}

Eigen::Vector2d PathSpline::d2(double u) const {
  const std::size_t k = segment_of(u);
  const double t = u - u_[k];
  const auto& c = coeffs_[k];
  return (2.0 * c.row(2) + 6.0 * t * c.row(3)).transpose();
}

double PathSpline::segment_length(std::size_t k, double t0, double t1) const {
  const auto& c = coeffs_[k];
  auto speed = [&c](double t) { return (c.row(1) + t * (2.0 * c.row(2) + 3.0 * t * c.row(3))).norm(); };
  return adaptive_gauss5(speed, t0, t1, gauss5(speed, t0, t1), 1e-10, 30);
}

double PathSpline::arc_length_to(double u) const {
  u = std::clamp(u, 0.0, max_param());
  const std::size_t k = segment_of(u);
  return cum_length_[k] + segment_length(k, 0.0, u - u_[k]);
}

double PathSpline::param_at_length(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= length()) return max_param();
  const auto it = std::upper_bound(cum_length_.begin(), cum_length_.end(), s);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cum_length_.begin()) - 1, segments() - 1);
  const double target = s - cum_length_[k];
  const double h = u_[k + 1] - u_[k];
  double lo = 0.0, hi = h;
  double t = h * target / (cum_length_[k + 1] - cum_length_[k]);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = segment_length(k, 0.0, t) - target;
    if (std::abs(f) < 1e-12) break;
    (f > 0.0 ? hi : lo) = t;
    const double speed = d1(u_[k] + t).norm();
    double next = speed > 0.0 ? t - f / speed : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
    if (hi - lo < 1e-15) break;
  }
  return u_[k] + t;
}

PathSpline fit_spline(const std::vector<Eigen::Vector2d>& vertices) {
  const auto n = static_cast<Eigen::Index>(vertices.size());
  if (n < 3) throw PreconditionError("spline fit needs at least three vertices");
  PathSpline sp;
  sp.knots_ = vertices;
  sp.u_.assign(n, 0.0);
  std::vector<double> h(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h[i] = (vertices[i + 1] - vertices[i]).norm();
    if (!(h[i] > 0.0)) throw DomainError("degenerate knot: vertices " + std::to_string(i) + " and " +
                                         std::to_string(i + 1) + " coincide");
    sp.u_[i + 1] = sp.u_[i] + h[i];
  }

  // Second derivatives M at the knots.
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(n, 2);
  if (n == 3) {
    trip.emplace_back(0, 0, 1.0);
    trip.emplace_back(0, 1, -1.0);
    trip.emplace_back(2, 1, 1.0);
    trip.emplace_back(2, 2, -1.0);
  } else {
    trip.emplace_back(0, 0, h[1]);
    trip.emplace_back(0, 1, -(h[0] + h[1]));
    trip.emplace_back(0, 2, h[0]);
    trip.emplace_back(n - 1, n - 3, h[n - 2]);
    trip.emplace_back(n - 1, n - 2, -(h[n - 3] + h[n - 2]));
    trip.emplace_back(n - 1, n - 1, h[n - 3]);
  }
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    trip.emplace_back(i, i - 1, h[i - 1]);
    trip.emplace_back(i, i, 2.0 * (h[i - 1] + h[i]));
    trip.emplace_back(i, i + 1, h[i]);
    const Eigen::Vector2d rate = (vertices[i + 1] - vertices[i]) / h[i] - (vertices[i] - vertices[i - 1]) / h[i - 1];
    rhs.row(i) = 6.0 * rate.transpose();
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw NumericError("spline system is singular");
  const Eigen::MatrixX2d M = lu.solve(rhs);
  if (!M.allFinite()) throw NumericError("spline system is singular");

  sp.coeffs_.resize(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const Eigen::RowVector2d y0 = vertices[i].transpose();
    const Eigen::RowVector2d y1 = vertices[i + 1].transpose();
    auto& c = sp.coeffs_[i];
    c.row(0) = y0;
    c.row(1) = (y1 - y0) / h[i] - h[i] * (2.0 * M.row(i) + M.row(i + 1)) / 6.0;
    c.row(2) = M.row(i) / 2.0;
    c.row(3) = (M.row(i + 1) - M.row(i)) / (6.0 * h[i]);
  }
  sp.cum_length_.assign(n, 0.0);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    sp.cum_length_[i + 1] = sp.cum_length_[i] + sp.segment_length(i, 0.0, h[i]);
  }
  return sp;
}

double curvature_at(const PathSpline& spline, double u) {
  if (!(u >= 0.0 && u <= spline.max_param())) throw RangeError("spline parameter out of domain");
  const Eigen::Vector2d a = spline.d1(u);
  const Eigen::Vector2d b = spline.d2(u);
  const double speed2 = a.squaredNorm();
  if (speed2 <= 1e-24) throw DomainError("curvature singular: zero parametric speed at u = " + std::to_string(u));
  return std::abs(a.x() * b.y() - a.y() * b.x()) / (speed2 * std::sqrt(speed2));
}

double VelocityProfile::cap(std::size_t k) const {
  const double kappa = std::abs(samples[k].kappa);
  return kappa > 0.0 ? std::min(limits.v_max, limits.omega_max / kappa) : limits.v_max;
}

VelocityProfile plan_velocity(const PathSpline& spline, const VelocityLimits& limits, double v_start,
                              double v_end, double ds) {
  if (!(ds > 0.0)) throw PreconditionError("velocity sample spacing must be positive");
  if (!(limits.v_max > 0.0) || !(limits.omega_max > 0.0) || !(limits.a_max > 0.0)) {
    throw PreconditionError("velocity limits must be positive");
  }
  if (v_start < 0.0 || v_end < 0.0) throw PreconditionError("boundary speeds must be non-negative");

  VelocityProfile prof;
  prof.limits = limits;
  prof.v_start = v_start;
  prof.v_end = v_end;
  const double total = spline.length();
  const auto intervals = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total / ds - 1e-9)));
  prof.samples.resize(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double s = k == intervals ? total : total * static_cast<double>(k) / static_cast<double>(intervals);
    prof.samples[k].s = s;
    prof.samples[k].kappa = curvature_at(spline, spline.param_at_length(s));
  }
  const std::size_t N = intervals;
  if (v_start > prof.cap(0) + 1e-12) throw PlanningError("start speed exceeds the speed limit at the start");
  if (v_end > prof.cap(N) + 1e-12) throw PlanningError("end speed exceeds the speed limit at the end");

  std::vector<double> fwd(N + 1), bwd(N + 1);
  fwd[0] = v_start;
  for (std::size_t k = 0; k < N; ++k) {
    const double step = prof.samples[k + 1].s - prof.samples[k].s;
    fwd[k + 1] = std::min(prof.cap(k + 1), std::sqrt(fwd[k] * fwd[k] + 2.0 * limits.a_max * step));
  }
  bwd[N] = v_end;
  for (std::size_t k = N; k-- > 0;) {
    const double step = prof.samples[k + 1].s - prof.samples[k].s;
    bwd[k] = std::min(prof.cap(k), std::sqrt(bwd[k + 1] * bwd[k + 1] + 2.0 * limits.a_max * step));
  }
  if (v_start > bwd[0] * (1.0 + 1e-12)) {
    throw PlanningError("start speed cannot be reduced in time to respect downstream limits");
  }
  if (v_end > fwd[N] * (1.0 + 1e-12)) throw PlanningError("end speed cannot be reached from the start");
  for (std::size_t k = 0; k <= N; ++k) prof.samples[k].v = std::min(fwd[k], bwd[k]);
  prof.samples.front().v = v_start;
  prof.samples.back().v = v_end;
  return prof;
}

PathMetrics compute_metrics(const PathSpline& spline, const VelocityProfile& profile, double ds) {
  if (!(ds > 0.0)) throw PreconditionError("metric sample spacing must be positive");
  if (profile.samples.empty()) throw PreconditionError("empty velocity profile");
  PathMetrics m;
  m.S = spline.length();
  for (std::size_t k = 0; k + 1 < profile.samples.size(); ++k) {
    const auto& a = profile.samples[k];
    const auto& b = profile.samples[k + 1];
    const double vsum = a.v + b.v;
    if (!(vsum > 0.0)) throw PlanningError("stalled profile: zero speed on interval " + std::to_string(k));
    m.T += 2.0 * (b.s - a.s) / vsum;
  }
  const double fine = 0.25 * ds;
  const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(m.S / fine - 1e-9)));
  double sum = 0.0;
  for (std::size_t k = 0; k <= count; ++k) {
    const double s = k == count ? m.S : m.S * static_cast<double>(k) / static_cast<double>(count);
    const double kappa = curvature_at(spline, spline.param_at_length(s));
    m.K_max = std::max(m.K_max, kappa);
    sum += kappa;
  }
  m.K_mean = sum / static_cast<double>(count + 1);
  return m;
}

void write_profile_csv(const VelocityProfile& profile, std::ostream& out) {
  const auto old = out.precision(10);
  out << "s,v,t_cumulative\n";
  double t = 0.0;
  for (std::size_t k = 0; k < profile.samples.size(); ++k) {
    const auto& p = profile.samples[k];
    if (k > 0) {
      const auto& q = profile.samples[k - 1];
      const double vsum = p.v + q.v;
      t += vsum > 0.0 ? 2.0 * (p.s - q.s) / vsum : std::numeric_limits<double>::infinity();
    }
    out << p.s << ',' << p.v << ',' << t << '\n';
  }
  out.precision(old);
}

void write_metrics_csv(const PathMetrics& metrics, std::ostream& out, bool header) {
  const auto old = out.precision(10);
  if (header) out << "S,T,K_max,K_mean\n";
  out << metrics.S << ',' << metrics.T << ',' << metrics.K_max << ',' << metrics.K_mean << '\n';
  out.precision(old);
}

}  // namespace g2vd
