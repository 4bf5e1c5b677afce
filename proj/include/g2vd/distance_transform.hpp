#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace g2vd {

inline constexpr std::int64_t kUnreachableSqDist = std::numeric_limits<std::int64_t>::max() / 4;

/// One-dimensional squared distance transform (lower envelope of parabolas).
/// `f` holds per-sample costs, kUnreachableSqDist for "no seed". Result is
/// min_q (p - q)^2 + f[q], exact for integer inputs.
inline void squared_dt_1d(const std::vector<std::int64_t>& f, std::vector<std::int64_t>& out,
                          std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  out.assign(n, kUnreachableSqDist);
  v.resize(n);
  z.resize(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] >= kUnreachableSqDist) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    auto intersect = [&](int r) {
      return (static_cast<double>(f[q] + static_cast<std::int64_t>(q) * q) -
              static_cast<double>(f[r] + static_cast<std::int64_t>(r) * r)) /
             (2.0 * (q - r));
    };
    double s = intersect(v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  if (k < 0) return;
  int j = 0;
  for (int p = 0; p < n; ++p) {
    while (z[j + 1] < p) ++j;
    const std::int64_t d = p - v[j];
    // Rounding at exact envelope crossings can pick either neighbour; both give
    // the same value there, so take the smaller of the two candidates.
    std::int64_t best = d * d + f[v[j]];
    if (j + 1 <= k) {
      const std::int64_t d2 = p - v[j + 1];
      best = std::min(best, d2 * d2 + f[v[j + 1]]);
    }
    if (j > 0) {
      const std::int64_t d0 = p - v[j - 1];
      best = std::min(best, d0 * d0 + f[v[j - 1]]);
    }
    out[p] = best;
  }
}

/// Exact squared Euclidean distance transform on a width x height raster
/// (row-major, index = iy * width + ix), in cell^2 units. `is_seed(index)`
/// marks the zero-distance cells. Cells with no seed anywhere get
/// kUnreachableSqDist.
template <typename SeedPredicate>
std::vector<std::int64_t> exact_squared_edt(int width, int height, SeedPredicate&& is_seed) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<std::int64_t> grid(n, kUnreachableSqDist);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_seed(static_cast<int>(i))) grid[i] = 0;
  }

  std::vector<std::int64_t> f, out;
  std::vector<int> v;
  std::vector<double> z;

  f.resize(height);
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) f[y] = grid[static_cast<std::size_t>(y) * width + x];
    squared_dt_1d(f, out, v, z);
    for (int y = 0; y < height; ++y) grid[static_cast<std::size_t>(y) * width + x] = out[y];
  }
  f.resize(width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) f[x] = grid[static_cast<std::size_t>(y) * width + x];
    squared_dt_1d(f, out, v, z);
    for (int x = 0; x < width; ++x) grid[static_cast<std::size_t>(y) * width + x] = out[x];
  }
  return grid;
}

}  // namespace g2vd
