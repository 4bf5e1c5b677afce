#include "g2vd/smoother.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <Eigen/SparseCholesky>

#include "g2vd/error.hpp"

namespace g2vd {

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& v, const BoxQp& qp) {
  return v.cwiseMax(qp.lower).cwiseMin(qp.upper);
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// Solve with the active set implied by (z, y) fixed at its bounds; returns the
// candidate or nullopt if the reduced system fails to factor.
std::optional<Eigen::VectorXd> polish(const BoxQp& qp, const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  const Eigen::Index n = qp.dimension();
  Eigen::VectorXd x = z;
  std::vector<Eigen::Index> free_idx;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool fixed = qp.lower[i] == qp.upper[i];
    const bool at_lower = std::isfinite(qp.lower[i]) && z[i] - qp.lower[i] < -y[i];
    const bool at_upper = std::isfinite(qp.upper[i]) && qp.upper[i] - z[i] < y[i];
    if (fixed || at_lower) {
      x[i] = qp.lower[i];
    } else if (at_upper) {
      x[i] = qp.upper[i];
    } else {
      slot[i] = static_cast<Eigen::Index>(free_idx.size());
      free_idx.push_back(i);
    }
  }
  if (free_idx.empty()) return x;
  const auto m = static_cast<Eigen::Index>(free_idx.size());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = -qp.q(free_idx);
  for (Eigen::Index k = 0; k < qp.P.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp.P, k); it; ++it) {
      const Eigen::Index r = it.row();
      const Eigen::Index c = it.col();
      if (slot[r] < 0) continue;
      if (slot[c] >= 0) {
        trip.emplace_back(slot[r], slot[c], it.value());
      } else {
        rhs[slot[r]] -= it.value() * x[c];
      }
    }
  }
  Eigen::SparseMatrix<double> reduced(m, m);
  reduced.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(reduced);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXd xf = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !xf.allFinite()) return std::nullopt;
  x(free_idx) = xf;
  return x;
}

}  // namespace

ReferencePath make_reference(std::vector<Eigen::Vector2d> vertices, std::vector<double> clearances, double r_c) {
  if (vertices.size() != clearances.size()) throw PreconditionError("vertex and clearance counts differ");
  ReferencePath ref;
  ref.vertices = std::move(vertices);
  ref.clearances = std::move(clearances);
  ref.r_c = r_c;
  ref.margins.reserve(ref.clearances.size());
  for (double d : ref.clearances) ref.margins.push_back(bubble_margin(d, r_c));
  return ref;
}

ReferencePath build_reference(const std::vector<Pose>& path, const GvdMap& gvd, double r_c,
                              const ReferenceOptions& options) {
  if (!(options.spacing > 0.0)) throw PreconditionError("reference spacing must be positive");
  std::vector<Eigen::Vector2d> pts;
  std::vector<double> cum;
  for (const auto& p : path) {
    const Eigen::Vector2d v = p.position();
    if (!pts.empty() && (v - pts.back()).norm() == 0.0) continue;
    cum.push_back(pts.empty() ? 0.0 : cum.back() + (v - pts.back()).norm());
    pts.push_back(v);
  }
  const double total = cum.empty() ? 0.0 : cum.back();
  if (total < 2.0 * options.spacing - 1e-9) {
    throw PreconditionError("search path shorter than two reference samples");
  }
  const int segments = std::max(2, static_cast<int>(std::lround(total / options.spacing)));
  std::vector<Eigen::Vector2d> verts;
  verts.reserve(segments + 1);
  std::size_t j = 1;
  for (int k = 0; k <= segments; ++k) {
    if (k == segments) {
      verts.push_back(pts.back());
      break;
    }
    const double s = total * k / segments;
    while (j < cum.size() - 1 && cum[j] < s) ++j;
    const double w = (s - cum[j - 1]) / (cum[j] - cum[j - 1]);
    verts.push_back(pts[j - 1] + w * (pts[j] - pts[j - 1]));
  }
  std::vector<double> clear;
  clear.reserve(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const double d = clearance_at(gvd, world_to_cell(gvd.grid(), verts[i]));
    if (options.reject_tight && d < r_c) {
      throw PlanningError("reference vertex " + std::to_string(i) + " has clearance " + std::to_string(d) +
                          " m below r_c " + std::to_string(r_c) + " m");
    }
    clear.push_back(d);
  }
  return make_reference(std::move(verts), std::move(clear), r_c);
}

BoxQp assemble_qp(const ReferencePath& ref, const SmootherConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(ref.size());
  if (n < 3) throw PreconditionError("smoothing needs at least three vertices");
  if (!(cfg.w_s > 0.0) || cfg.w_r < 0.0) throw PreconditionError("smoother weights out of range");
  if (ref.margins.size() != ref.vertices.size()) throw PreconditionError("reference margins missing");

  // D'D for the second-difference operator, one coordinate.
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const Eigen::Index idx[3] = {i - 1, i, i + 1};
    const double coef[3] = {1.0, -2.0, 1.0};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        for (int dim = 0; dim < 2; ++dim) {
          trip.emplace_back(2 * idx[a] + dim, 2 * idx[b] + dim, 2.0 * cfg.w_s * coef[a] * coef[b]);
        }
      }
    }
  }
  for (Eigen::Index k = 0; k < 2 * n; ++k) trip.emplace_back(k, k, 2.0 * cfg.w_r);

  BoxQp qp;
  qp.P.resize(2 * n, 2 * n);
  qp.P.setFromTriplets(trip.begin(), trip.end());
  qp.q.resize(2 * n);
  qp.lower.resize(2 * n);
  qp.upper.resize(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double b = (i == 0 || i == n - 1) ? 0.0 : ref.margins[i];
    for (int dim = 0; dim < 2; ++dim) {
      const double r = ref.vertices[i][dim];
      qp.q[2 * i + dim] = -2.0 * cfg.w_r * r;
      qp.lower[2 * i + dim] = r - b;
      qp.upper[2 * i + dim] = r + b;
    }
  }
  return qp;
}

double projected_gradient_norm(const BoxQp& qp, const Eigen::VectorXd& x) {
  const Eigen::VectorXd grad = qp.P * x + qp.q;
  return inf_norm(x - clamp(x - grad, qp));
}

BoxQpResult solve_box_qp(const BoxQp& qp, const SmootherConfig& cfg, const std::optional<Eigen::VectorXd>& warm_start) {
  const Eigen::Index n = qp.dimension();
  if (qp.P.rows() != n || qp.P.cols() != n || qp.lower.size() != n || qp.upper.size() != n) {
    throw PreconditionError("box QP dimensions disagree");
  }
  for (Eigen::Index k = 0; k < qp.P.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp.P, k); it; ++it) {
      if (!std::isfinite(it.value())) throw NumericError("non-finite quadratic term");
    }
  }
  if (!qp.q.allFinite()) throw NumericError("non-finite linear term");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isnan(qp.lower[i]) || std::isnan(qp.upper[i])) throw NumericError("NaN bound");
    if (qp.lower[i] > qp.upper[i]) throw PreconditionError("lower bound exceeds upper bound");
  }
  if (warm_start && (warm_start->size() != n || !warm_start->allFinite())) {
    throw NumericError("invalid warm start");
  }

  BoxQpResult res;
  Eigen::VectorXd z = warm_start ? clamp(*warm_start, qp) : clamp(Eigen::VectorXd::Zero(n), qp);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  double rho = cfg.penalty;
  const double alpha = cfg.relaxation;

  Eigen::SparseMatrix<double> ident(n, n);
  ident.setIdentity();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> kkt;
  auto factor = [&] {
    kkt.compute(qp.P + rho * ident);
    if (kkt.info() != Eigen::Success) throw NumericError("box QP matrix is not positive definite");
  };
  factor();

  auto certify = [&](const Eigen::VectorXd& x) {
    const double viol = inf_norm((qp.lower - x).cwiseMax(0.0)) + inf_norm((x - qp.upper).cwiseMax(0.0));
    return std::pair{viol, projected_gradient_norm(qp, x)};
  };
  auto accept = [&](const Eigen::VectorXd& x, bool polished) {
    auto [viol, pg] = certify(x);
    if (viol <= cfg.tolerance && pg <= cfg.tolerance) {
      res.x = x;
      res.bound_violation = viol;
      res.projected_gradient = pg;
      res.status = SolveStatus::Solved;
      res.polished = polished;
      return true;
    }
    return false;
  };

  if (accept(z, false)) return res;

  Eigen::VectorXd xt(n), xh(n), z_prev(n);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    res.iterations = it;
    xt = kkt.solve(rho * z - y - qp.q);
    xh = alpha * xt + (1.0 - alpha) * z;
    z_prev = z;
    z = clamp(xh + y / rho, qp);
    y += rho * (xh - z);
    res.objective_history.push_back(qp.objective(z));

    const double r_prim = inf_norm(xt - z);
    const double r_dual = inf_norm(rho * (z - z_prev));
    const bool check = it % cfg.rescale_interval == 0;
    const bool converged = r_prim <= cfg.tolerance && r_dual <= cfg.tolerance;
    if (check || converged) {
      if (auto xp = polish(qp, z, y); xp && accept(*xp, true)) return res;
      if (accept(z, false)) return res;
    }
    if (check) {
      const double prim_scale = std::max({inf_norm(xt), inf_norm(z), 1e-12});
      const double dual_scale = std::max({inf_norm(qp.P * xt), inf_norm(qp.q), inf_norm(y), 1e-12});
      const double ratio = std::sqrt((r_prim / prim_scale) / std::max(r_dual / dual_scale, 1e-300));
      const double proposed = std::clamp(rho * ratio, 1e-6, 1e6);
      if (proposed > 5.0 * rho || proposed < 0.2 * rho) {
        rho = proposed;
        factor();
      }
    }
  }
  res.x = z;
  auto [viol, pg] = certify(z);
  res.bound_violation = viol;
  res.projected_gradient = pg;
  res.status = SolveStatus::MaxIterations;
  return res;
}

double smoothing_objective(const ReferencePath& ref, const SmootherConfig& cfg,
                           const std::vector<Eigen::Vector2d>& v) {
  double smooth_term = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) smooth_term += (v[i + 1] - 2.0 * v[i] + v[i - 1]).squaredNorm();
  double dev_term = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) dev_term += (v[i] - ref.vertices[i]).squaredNorm();
  return cfg.w_s * smooth_term + cfg.w_r * dev_term;
}

SmoothedPath smooth(const ReferencePath& ref, const SmootherConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const BoxQp qp = assemble_qp(ref, cfg);
  Eigen::VectorXd x0(2 * ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) x0.segment<2>(2 * i) = ref.vertices[i];
  const BoxQpResult sol = solve_box_qp(qp, cfg, x0);

  SmoothedPath out;
  out.vertices.resize(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) out.vertices[i] = sol.x.segment<2>(2 * i);
  // Endpoints are fixed by equal bounds; copy them so they hold bit-exactly.
  out.vertices.front() = ref.vertices.front();
  out.vertices.back() = ref.vertices.back();
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.projected_gradient = sol.projected_gradient;
  out.objective = smoothing_objective(ref, cfg, out.vertices);
  out.reference_objective = smoothing_objective(ref, cfg, ref.vertices);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void write_path_xy(const std::vector<Eigen::Vector2d>& vertices, std::ostream& out) {
  const auto old = out.precision(12);
  for (const auto& v : vertices) out << v.x() << ' ' << v.y() << '\n';
  out.precision(old);
}

}  // namespace g2vd
