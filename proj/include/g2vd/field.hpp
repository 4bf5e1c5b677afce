#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "g2vd/corridor.hpp"
#include "g2vd/error.hpp"

namespace g2vd {

/// Voronoi potential: (d_v / (d_o + d_v)) * ((d_o - d_o_min) / d_o_min)^2 for
/// d_o <= d_o_min, zero beyond. Throws DomainError when d_o = d_v = 0.
template <typename Scalar>
Scalar rho_v(Scalar d_o, Scalar d_v, Scalar d_o_min) {
  if (!(d_o_min > Scalar(0))) throw DomainError("d_o_min must be positive");
  if (d_o < Scalar(0) || d_v < Scalar(0)) throw DomainError("distances must be non-negative");
  if (d_o == Scalar(0) && d_v == Scalar(0)) {
    throw DomainError("obstacle and Voronoi distance cannot both be zero");
  }
  if (d_o > d_o_min) return Scalar(0);
  const Scalar gap = (d_o - d_o_min) / d_o_min;
  return d_v / (d_o + d_v) * gap * gap;
}

struct VoronoiDistance {
  /// Meters to the nearest Voronoi cell for corridor members, +inf elsewhere.
  std::vector<double> d_v;
  /// False when no Voronoi cell exists; all d_v are then +inf.
  bool has_voronoi = true;
};

/// Exact Euclidean distance from every corridor cell to the nearest Voronoi
/// cell, via a two-pass squared distance transform seeded at Voronoi cells.
VoronoiDistance distance_to_voronoi(const GvdMap& gvd, const VoronoiCorridor& corridor);

/// Voronoi potential over a corridor. Obstacle cells read as 1; free cells
/// outside the corridor are not evaluated (NaN).
class VoronoiField {
 public:
  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double d_o_min() const { return d_o_min_; }
  bool has_voronoi() const { return has_voronoi_; }

  bool in_corridor(int index) const { return mask_[index] != 0; }
  bool in_corridor(CellIndex c) const {
    return c.ix >= 0 && c.iy >= 0 && c.ix < width_ && c.iy < height_ && mask_[c.iy * width_ + c.ix] != 0;
  }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  double rho(int index) const { return rho_[index]; }
  double rho(CellIndex c) const { return rho_[c.iy * width_ + c.ix]; }
  double d_o(int index) const { return d_o_[index]; }
  double d_v(int index) const { return d_v_[index]; }

 private:
  friend VoronoiField build_field(const GvdMap&, const VoronoiCorridor&, double, bool);

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.0;
  double d_o_min_ = 0.0;
  bool has_voronoi_ = true;
  std::vector<std::uint8_t> mask_;
  std::vector<double> d_o_;
  std::vector<double> d_v_;
  std::vector<double> rho_;
};

/// `flat` zeroes the potential everywhere outside obstacles (the unweighted
/// cost baseline).
VoronoiField build_field(const GvdMap& gvd, const VoronoiCorridor& corridor, double d_o_min,
                         bool flat = false);

/// CSV `ix,iy,d_o,d_v,rho` over corridor cells.
void write_field_csv(const VoronoiField& field, std::ostream& out);

}  // namespace g2vd
