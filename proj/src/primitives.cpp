#include "g2vd/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "g2vd/error.hpp"

namespace g2vd {

namespace {

constexpr int kFormatVersion = 1;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr std::array<std::array<int, 2>, kNumHeadings> kHeadingVectors{{
    {1, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 1}, {-1, 2}, {-1, 1}, {-2, 1},
    {-1, 0}, {-2, -1}, {-1, -1}, {-1, -2}, {0, -1}, {1, -2}, {1, -1}, {2, -1},
}};

void check_heading(int h) {
  if (h < 0 || h >= kNumHeadings) throw RangeError("heading index " + std::to_string(h) + " out of range");
}

int wrap_heading(int h) { return ((h % kNumHeadings) + kNumHeadings) % kNumHeadings; }

double polyline_length(const std::vector<Pose>& poses) {
  double len = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    len += std::hypot(poses[i].x - poses[i - 1].x, poses[i].y - poses[i - 1].y);
  }
  return len;
}

// Fills the derived fields from start/end headings and poses.
void finalize(MotionPrimitive& p, double resolution) {
  const Pose& last = p.poses.back();
  p.end_offset = {static_cast<int>(std::lround(last.x / resolution)),
                  static_cast<int>(std::lround(last.y / resolution))};
  p.length = polyline_length(p.poses);
  p.delta_theta = std::abs(angle_diff(last.theta, p.poses.front().theta));
  if (p.length == 0.0) {
    p.kind = PrimitiveKind::Rotation;
  } else if (p.start_heading != p.end_heading) {
    p.kind = PrimitiveKind::Curved;
  } else {
    const CellIndex v = heading_vector(p.start_heading);
    p.kind = (v.ix * p.end_offset.ix + v.iy * p.end_offset.iy) < 0 ? PrimitiveKind::Backward
                                                                    : PrimitiveKind::Straight;
  }
}

std::vector<Pose> straight_poses(CellIndex offset, double heading_theta, double resolution, double spacing) {
  const Eigen::Vector2d end(offset.ix * resolution, offset.iy * resolution);
  const int segments = std::max(1, static_cast<int>(std::ceil(end.norm() / spacing - 1e-9)));
  std::vector<Pose> poses;
  for (int k = 0; k <= segments; ++k) {
    const Eigen::Vector2d p = end * (static_cast<double>(k) / segments);
    poses.push_back({p.x(), p.y(), heading_theta});
  }
  poses.back() = {end.x(), end.y(), heading_theta};
  return poses;
}

double bezier_curvature(const Eigen::Matrix<double, 2, 6>& ctrl, double t) {
  const Eigen::Vector2d d1 = bezier_derivative(ctrl, t);
  const Eigen::Vector2d d2 = bezier_second_derivative(ctrl, t);
  return std::abs(d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.squaredNorm(), 1.5);
}

// Lattice endpoint for a one-step turn: the integer offset whose direction is
// closest to the bisector of the two headings, shortest first on ties.
CellIndex turn_endpoint(double theta0, double theta1, const PrimitiveConfig& cfg) {
  const double bisector = theta0 + 0.5 * angle_diff(theta1, theta0);
  const int reach = static_cast<int>(std::ceil(cfg.curve_max_cells));
  CellIndex best{0, 0};
  double best_dev = std::numeric_limits<double>::infinity();
  double best_len = std::numeric_limits<double>::infinity();
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const double len = std::hypot(dx, dy);
      if (len < cfg.curve_min_cells - 1e-9 || len > cfg.curve_max_cells + 1e-9) continue;
      const double dev = std::abs(angle_diff(std::atan2(dy, dx), bisector));
      if (dev < best_dev - 1e-12 || (std::abs(dev - best_dev) <= 1e-12 && len < best_len)) {
        best = {dx, dy};
        best_dev = dev;
        best_len = len;
      }
    }
  }
  if (!std::isfinite(best_dev)) throw PreconditionError("empty chord range for turning primitives");
  return best;
}

MotionPrimitive curved_primitive(int start, int end, double resolution, double spacing,
                                 const PrimitiveConfig& cfg) {
  const double th0 = heading_angle(start);
  const double th1 = heading_angle(end);
  const CellIndex off = turn_endpoint(th0, th1, cfg);
  const Eigen::Vector2d p5(off.ix * resolution, off.iy * resolution);
  const auto ctrl = turning_bezier(Eigen::Vector2d::Zero(), th0, p5, th1);

  constexpr int kDense = 2000;
  std::vector<double> arc(kDense + 1, 0.0);
  Eigen::Vector2d prev = bezier_point(ctrl, 0.0);
  double max_kappa = 0.0;
  for (int k = 1; k <= kDense; ++k) {
    const double t = static_cast<double>(k) / kDense;
    const Eigen::Vector2d cur = bezier_point(ctrl, t);
    arc[k] = arc[k - 1] + (cur - prev).norm();
    prev = cur;
    max_kappa = std::max(max_kappa, bezier_curvature(ctrl, t));
  }
  MotionPrimitive p;
  p.start_heading = start;
  p.end_heading = end;
  if (max_kappa > cfg.max_curvature) {
    std::ostringstream msg;
    msg << "primitive heading " << start << " -> " << end << " needs curvature " << max_kappa
        << " 1/m, above the bound " << cfg.max_curvature;
    throw PreconditionError(msg.str());
  }
  const double total = arc.back();
  const int segments = std::max(1, static_cast<int>(std::ceil(total / spacing - 1e-9)));
  p.poses.push_back({0.0, 0.0, th0});
  std::size_t j = 1;
  for (int k = 1; k < segments; ++k) {
    const double target = total * k / segments;
    while (j < arc.size() - 1 && arc[j] < target) ++j;
    const double w = (target - arc[j - 1]) / (arc[j] - arc[j - 1]);
    const double t = (static_cast<double>(j - 1) + w) / kDense;
    const Eigen::Vector2d pt = bezier_point(ctrl, t);
    const Eigen::Vector2d d = bezier_derivative(ctrl, t);
    p.poses.push_back({pt.x(), pt.y(), normalize_angle(std::atan2(d.y(), d.x()))});
  }
  p.poses.push_back({p5.x(), p5.y(), th1});
  return p;
}

std::string kind_name(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Straight: return "straight";
    case PrimitiveKind::Curved: return "curved";
    case PrimitiveKind::Rotation: return "rotation";
    case PrimitiveKind::Backward: return "backward";
  }
  return "?";
}

}  // namespace

double normalize_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double angle_diff(double to, double from) {
  double d = std::fmod(to - from, kTwoPi);
  if (d > std::numbers::pi) d -= kTwoPi;
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

CellIndex heading_vector(int heading) {
  check_heading(heading);
  return {kHeadingVectors[heading][0], kHeadingVectors[heading][1]};
}

double heading_angle(int heading) {
  const CellIndex v = heading_vector(heading);
  return normalize_angle(std::atan2(static_cast<double>(v.iy), static_cast<double>(v.ix)));
}

int nearest_heading(double theta) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int h = 0; h < kNumHeadings; ++h) {
    const double d = std::abs(angle_diff(theta, heading_angle(h)));
    if (d < best_d) {
      best_d = d;
      best = h;
    }
  }
  return best;
}

std::string MotionPrimitive::name() const {
  return kind_name(kind) + " " + std::to_string(start_heading) + "->" + std::to_string(end_heading) + " (" +
         std::to_string(end_offset.ix) + "," + std::to_string(end_offset.iy) + ")";
}

void PrimitiveSet::index() {
  for (auto& v : by_heading) v.clear();
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    check_heading(primitives[i].start_heading);
    by_heading[primitives[i].start_heading].push_back(i);
  }
}

Eigen::Matrix<double, 2, 6> turning_bezier(const Eigen::Vector2d& p0, double theta0,
                                           const Eigen::Vector2d& p5, double theta1) {
  const double chord = (p5 - p0).norm();
  const Eigen::Vector2d t0(std::cos(theta0), std::sin(theta0));
  const Eigen::Vector2d t1(std::cos(theta1), std::sin(theta1));
  Eigen::Matrix<double, 2, 6> c;
  // P0, P1, P2 collinear (and P3, P4, P5) gives zero curvature at both ends.
  c.col(0) = p0;
  c.col(1) = p0 + chord / 6.0 * t0;
  c.col(2) = p0 + chord / 3.0 * t0;
  c.col(3) = p5 - chord / 3.0 * t1;
  c.col(4) = p5 - chord / 6.0 * t1;
  c.col(5) = p5;
  return c;
}

Eigen::Vector2d bezier_point(const Eigen::Matrix<double, 2, 6>& ctrl, double t) {
  static constexpr double kBinom[6] = {1, 5, 10, 10, 5, 1};
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  for (int i = 0; i < 6; ++i) p += kBinom[i] * std::pow(1.0 - t, 5 - i) * std::pow(t, i) * ctrl.col(i);
  return p;
}

Eigen::Vector2d bezier_derivative(const Eigen::Matrix<double, 2, 6>& ctrl, double t) {
  static constexpr double kBinom[5] = {1, 4, 6, 4, 1};
  Eigen::Vector2d d = Eigen::Vector2d::Zero();
  for (int i = 0; i < 5; ++i) {
    d += kBinom[i] * std::pow(1.0 - t, 4 - i) * std::pow(t, i) * (ctrl.col(i + 1) - ctrl.col(i));
  }
  return 5.0 * d;
}

Eigen::Vector2d bezier_second_derivative(const Eigen::Matrix<double, 2, 6>& ctrl, double t) {
  static constexpr double kBinom[4] = {1, 3, 3, 1};
  Eigen::Vector2d d = Eigen::Vector2d::Zero();
  for (int i = 0; i < 4; ++i) {
    d += kBinom[i] * std::pow(1.0 - t, 3 - i) * std::pow(t, i) *
         (ctrl.col(i + 2) - 2.0 * ctrl.col(i + 1) + ctrl.col(i));
  }
  return 20.0 * d;
}

std::vector<CellIndex> sweep_footprint(const std::vector<Pose>& poses, double half, double res) {
  std::set<CellIndex> cells;
  const double r_c = half * std::sqrt(2.0);
  const double hr = 0.5 * res;
  constexpr double kEps = 1e-9;
  auto stamp = [&](double x, double y, double th) {
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double extent = half * (std::abs(c) + std::abs(s));
    const int x0 = static_cast<int>(std::floor((x - r_c) / res)) - 1;
    const int x1 = static_cast<int>(std::ceil((x + r_c) / res)) + 1;
    const int y0 = static_cast<int>(std::floor((y - r_c) / res)) - 1;
    const int y1 = static_cast<int>(std::ceil((y + r_c) / res)) + 1;
    for (int iy = y0; iy <= y1; ++iy) {
      for (int ix = x0; ix <= x1; ++ix) {
        const double dx = ix * res - x;
        const double dy = iy * res - y;
        // Separating axis test: cell axes, then footprint axes.
        if (std::abs(dx) >= hr + extent - kEps) continue;
        if (std::abs(dy) >= hr + extent - kEps) continue;
        if (std::abs(dx * c + dy * s) >= half + hr * (std::abs(c) + std::abs(s)) - kEps) continue;
        if (std::abs(-dx * s + dy * c) >= half + hr * (std::abs(s) + std::abs(c)) - kEps) continue;
        cells.insert({ix, iy});
      }
    }
  };
  // Sub-sample between poses so the swept area is covered: translation steps
  // of res/8 and rotation steps of half a degree.
  const double max_step = res / 8.0;
  const double max_turn = 0.5 * std::numbers::pi / 180.0;
  stamp(poses.front().x, poses.front().y, poses.front().theta);
  for (std::size_t i = 1; i < poses.size(); ++i) {
    const Pose& a = poses[i - 1];
    const Pose& b = poses[i];
    const double dist = std::hypot(b.x - a.x, b.y - a.y);
    const double turn = angle_diff(b.theta, a.theta);
    const int steps = std::max(1, static_cast<int>(std::ceil(std::max(dist / max_step, std::abs(turn) / max_turn))));
    for (int k = 1; k <= steps; ++k) {
      const double w = static_cast<double>(k) / steps;
      stamp(a.x + w * (b.x - a.x), a.y + w * (b.y - a.y), a.theta + w * turn);
    }
  }
  return {cells.begin(), cells.end()};
}

std::vector<CellIndex> compute_swath(const MotionPrimitive& prim, double half, double res) {
  return sweep_footprint(prim.poses, half, res);
}

PrimitiveSet generate_primitives(double resolution, double half, const PrimitiveConfig& cfg) {
  if (!(resolution > 0.0)) throw PreconditionError("primitive resolution must be positive");
  if (!(half > 0.0)) throw PreconditionError("footprint half width must be positive");
  const double spacing = cfg.pose_spacing > 0.0 ? std::min(cfg.pose_spacing, resolution / 2.0) : resolution / 2.0;

  PrimitiveSet set;
  set.resolution = resolution;
  set.footprint = half;
  set.r_c = half * std::sqrt(2.0);
  for (int h = 0; h < kNumHeadings; ++h) {
    const double th = heading_angle(h);
    const CellIndex v = heading_vector(h);
    for (int m : cfg.straight_multiples) {
      if (m <= 0) throw PreconditionError("straight multiples must be positive");
      MotionPrimitive p;
      p.start_heading = p.end_heading = h;
      p.poses = straight_poses({v.ix * m, v.iy * m}, th, resolution, spacing);
      set.primitives.push_back(std::move(p));
    }
    if (cfg.allow_backward) {
      MotionPrimitive p;
      p.start_heading = p.end_heading = h;
      p.poses = straight_poses({-v.ix, -v.iy}, th, resolution, spacing);
      set.primitives.push_back(std::move(p));
    }
    for (int step : {1, -1}) {
      set.primitives.push_back(curved_primitive(h, wrap_heading(h + step), resolution, spacing, cfg));
    }
    for (int step : {1, -1}) {
      MotionPrimitive p;
      p.start_heading = h;
      p.end_heading = wrap_heading(h + step);
      p.poses = {{0.0, 0.0, th}, {0.0, 0.0, heading_angle(p.end_heading)}};
      set.primitives.push_back(std::move(p));
    }
  }
  for (auto& p : set.primitives) {
    finalize(p, resolution);
    p.swath = compute_swath(p, half, resolution);
  }
  set.index();
  return set;
}

void save_primitives(const PrimitiveSet& set, std::ostream& out) {
  out << std::setprecision(17);
  out << "version " << kFormatVersion << '\n'
      << "resolution " << set.resolution << '\n'
      << "num_headings " << set.num_headings << '\n'
      << "footprint " << set.footprint << '\n'
      << "num_primitives " << set.primitives.size() << '\n';
  for (const auto& p : set.primitives) {
    out << "primitive\n"
        << "start_heading " << p.start_heading << '\n'
        << "end_heading " << p.end_heading << '\n'
        << "n " << p.poses.size() << '\n';
    for (const auto& s : p.poses) out << s.x << ' ' << s.y << ' ' << s.theta << '\n';
    out << "swath " << p.swath.size() << '\n';
    for (const auto& c : p.swath) out << c.ix << ' ' << c.iy << '\n';
  }
}

void save_primitives(const PrimitiveSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write primitive file " + path.string());
  save_primitives(set, out);
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next() {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      if (text.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(text);
    }
    throw ParseError("unexpected end of primitive file", line_ + 1);
  }

  template <typename T>
  T keyed(const std::string& key) {
    auto s = next();
    std::string k;
    T value{};
    if (!(s >> k) || k != key) throw ParseError("expected '" + key + "'", line_);
    if (!(s >> value)) throw ParseError("bad value for '" + key + "'", line_);
    expect_end(s);
    return value;
  }

  void expect_end(std::istringstream& s) const {
    std::string rest;
    if (s >> rest) throw ParseError("trailing token '" + rest + "'", line_);
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace

PrimitiveSet load_primitives(std::istream& in) {
  LineReader r(in);
  const int version = r.keyed<int>("version");
  if (version != kFormatVersion) {
    throw ParseError("unsupported primitive file version " + std::to_string(version), r.line());
  }
  PrimitiveSet set;
  set.resolution = r.keyed<double>("resolution");
  set.num_headings = r.keyed<int>("num_headings");
  if (set.num_headings != kNumHeadings) throw ParseError("only 16 headings are supported", r.line());
  set.footprint = r.keyed<double>("footprint");
  if (!(set.resolution > 0.0) || !(set.footprint > 0.0)) {
    throw ParseError("resolution and footprint must be positive", r.line());
  }
  set.r_c = set.footprint * std::sqrt(2.0);
  const auto count = r.keyed<std::size_t>("num_primitives");
  for (std::size_t i = 0; i < count; ++i) {
    {
      auto s = r.next();
      std::string tag;
      if (!(s >> tag) || tag != "primitive") throw ParseError("expected 'primitive'", r.line());
    }
    MotionPrimitive p;
    p.start_heading = r.keyed<int>("start_heading");
    p.end_heading = r.keyed<int>("end_heading");
    if (p.start_heading < 0 || p.start_heading >= kNumHeadings || p.end_heading < 0 ||
        p.end_heading >= kNumHeadings) {
      throw ParseError("heading index out of range", r.line());
    }
    const auto n = r.keyed<std::size_t>("n");
    if (n < 2) throw ParseError("primitive needs at least two poses", r.line());
    for (std::size_t k = 0; k < n; ++k) {
      auto s = r.next();
      Pose pose;
      if (!(s >> pose.x >> pose.y >> pose.theta)) throw ParseError("expected 'x y theta'", r.line());
      r.expect_end(s);
      p.poses.push_back(pose);
    }
    const auto m = r.keyed<std::size_t>("swath");
    for (std::size_t k = 0; k < m; ++k) {
      auto s = r.next();
      CellIndex c;
      if (!(s >> c.ix >> c.iy)) throw ParseError("expected 'ix iy'", r.line());
      r.expect_end(s);
      p.swath.push_back(c);
    }
    finalize(p, set.resolution);
    set.primitives.push_back(std::move(p));
  }
  set.index();
  return set;
}

PrimitiveSet load_primitives(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open primitive file " + path.string());
  return load_primitives(in);
}

}  // namespace g2vd
