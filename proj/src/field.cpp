#include "g2vd/field.hpp"

#include <cmath>
#include <ostream>

#include "g2vd/distance_transform.hpp"

namespace g2vd {

VoronoiDistance distance_to_voronoi(const GvdMap& gvd, const VoronoiCorridor& corridor) {
  if (corridor.width != gvd.width() || corridor.height != gvd.height()) {
    throw PreconditionError("corridor and GVD sizes differ");
  }
  VoronoiDistance out;
  out.d_v.assign(gvd.size(), std::numeric_limits<double>::infinity());
  out.has_voronoi = gvd.voronoi_count() > 0;
  if (!out.has_voronoi) return out;
  auto d2 = exact_squared_edt(gvd.width(), gvd.height(), [&](int i) { return gvd.is_voronoi(i); });
  for (std::size_t i = 0; i < gvd.size(); ++i) {
    if (corridor.mask[i]) out.d_v[i] = std::sqrt(static_cast<double>(d2[i])) * gvd.resolution();
  }
  return out;
}

VoronoiField build_field(const GvdMap& gvd, const VoronoiCorridor& corridor, double d_o_min, bool flat) {
  if (!(d_o_min > 0.0)) throw PreconditionError("d_o_min must be positive");
  VoronoiField f;
  f.width_ = gvd.width();
  f.height_ = gvd.height();
  f.resolution_ = gvd.resolution();
  f.d_o_min_ = d_o_min;
  f.mask_ = corridor.mask;
  const auto n = gvd.size();
  f.d_o_.assign(n, std::numeric_limits<double>::quiet_NaN());
  f.rho_.assign(n, std::numeric_limits<double>::quiet_NaN());
  auto dist = distance_to_voronoi(gvd, corridor);
  f.has_voronoi_ = dist.has_voronoi;
  f.d_v_ = std::move(dist.d_v);
  for (std::size_t i = 0; i < n; ++i) {
    const int idx = static_cast<int>(i);
    if (gvd.is_obstacle(idx)) {
      f.mask_[i] = 0;
      f.d_o_[i] = 0.0;
      f.rho_[i] = 1.0;
      continue;
    }
    if (!f.mask_[i]) continue;
    const double d_o = clearance_at(gvd, gvd.grid().cell(idx));
    f.d_o_[i] = d_o;
    if (flat || d_o > d_o_min) {
      f.rho_[i] = 0.0;
    } else if (!std::isfinite(f.d_v_[i])) {
      // No Voronoi edge in scope: the distance ratio tends to one.
      const double gap = (d_o - d_o_min) / d_o_min;
      f.rho_[i] = gap * gap;
    } else {
      f.rho_[i] = rho_v(d_o, f.d_v_[i], d_o_min);
    }
  }
  return f;
}

void write_field_csv(const VoronoiField& field, std::ostream& out) {
  out << "ix,iy,d_o,d_v,rho\n";
  for (int iy = 0; iy < field.height(); ++iy) {
    for (int ix = 0; ix < field.width(); ++ix) {
      const int i = iy * field.width() + ix;
      if (!field.in_corridor(i)) continue;
      out << ix << ',' << iy << ',' << field.d_o(i) << ',' << field.d_v(i) << ',' << field.rho(i) << '\n';
    }
  }
}

}  // namespace g2vd
