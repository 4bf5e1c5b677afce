#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace qp_oracle {

// Tries every lower/upper/free pattern of min 1/2 x'Px + q'x over a box and
// returns the first KKT point. Exponential; meant for dimension <= 8.
inline std::optional<Eigen::VectorXd> enumerate_active_sets(const Eigen::MatrixXd& P, const Eigen::VectorXd& q,
                                                            const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(q.size());
  int patterns = 1;
  for (int i = 0; i < n; ++i) patterns *= 3;
  for (int code = 0; code < patterns; ++code) {
    std::vector<int> state(n);
    for (int i = 0, c = code; i < n; ++i, c /= 3) state[i] = c % 3;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<int> free;
    bool skip = false;
    for (int i = 0; i < n; ++i) {
      if (state[i] == 1) {
        if (!std::isfinite(lo[i])) skip = true;
        x[i] = lo[i];
      } else if (state[i] == 2) {
        if (!std::isfinite(hi[i]) || lo[i] == hi[i]) skip = true;
        x[i] = hi[i];
      } else {
        free.push_back(i);
      }
    }
    if (skip) continue;
    if (!free.empty()) {
      const int m = static_cast<int>(free.size());
      Eigen::MatrixXd A(m, m);
      Eigen::VectorXd b(m);
      for (int r = 0; r < m; ++r) {
        b[r] = -q[free[r]];
        for (int c = 0; c < n; ++c)
          if (state[c] != 0) b[r] -= P(free[r], c) * x[c];
        for (int c = 0; c < m; ++c) A(r, c) = P(free[r], free[c]);
      }
      const Eigen::VectorXd xf = A.llt().solve(b);
      for (int r = 0; r < m; ++r) x[free[r]] = xf[r];
    }
    const Eigen::VectorXd g = P * x + q;
    bool kkt = true;
    for (int i = 0; i < n && kkt; ++i) {
      if (x[i] < lo[i] - 1e-10 || x[i] > hi[i] + 1e-10) kkt = false;
      if (state[i] == 1 && lo[i] != hi[i] && g[i] < -1e-9) kkt = false;
      if (state[i] == 2 && g[i] > 1e-9) kkt = false;
    }
    if (kkt) return x;
  }
  return std::nullopt;
}

}  // namespace qp_oracle
