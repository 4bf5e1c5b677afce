#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "g2vd/error.hpp"
#include "g2vd/primitives.hpp"

using namespace g2vd;

namespace {

const PrimitiveSet& default_set() {
  static const PrimitiveSet set = generate_primitives(0.1, 0.4);
  return set;
}

const MotionPrimitive& find(const PrimitiveSet& set, int start, int end, PrimitiveKind kind, double length = -1.0) {
  for (const auto& p : set.primitives) {
    if (p.start_heading == start && p.end_heading == end && p.kind == kind &&
        (length < 0.0 || std::abs(p.length - length) < 1e-9))
      return p;
  }
  FAIL("primitive not found");
  return set.primitives.front();
}

}  // namespace

TEST_CASE("heading set") {
  CHECK(heading_angle(0) == 0.0);
  CHECK(heading_angle(1) == std::atan2(1.0, 2.0));
  CHECK(heading_angle(2) == doctest::Approx(std::numbers::pi / 4));
  CHECK(heading_angle(4) == doctest::Approx(std::numbers::pi / 2));
  CHECK(heading_angle(12) == doctest::Approx(3 * std::numbers::pi / 2));
  for (int h = 0; h < kNumHeadings; ++h) {
    CHECK(nearest_heading(heading_angle(h)) == h);
    CHECK(nearest_heading(heading_angle(h) + 2 * std::numbers::pi) == h);
    if (h > 0) CHECK(heading_angle(h) > heading_angle(h - 1));
  }
  CHECK_THROWS_AS(heading_vector(16), RangeError);
  CHECK(normalize_angle(-0.5) == doctest::Approx(2 * std::numbers::pi - 0.5));
  CHECK(angle_diff(0.1, 2 * std::numbers::pi - 0.1) == doctest::Approx(0.2));
}

TEST_CASE("straight and rotation primitives") {
  const auto& set = default_set();
  const auto& east = find(set, 0, 0, PrimitiveKind::Straight, 0.1);
  CHECK(east.poses.front() == Pose{0, 0, 0});
  CHECK(east.poses.back() == Pose{0.1, 0, 0});
  CHECK(east.end_offset == CellIndex{1, 0});

  const auto& diag = find(set, 2, 2, PrimitiveKind::Straight, 0.1 * std::sqrt(2.0));
  CHECK(diag.poses.back().x == doctest::Approx(0.1));
  CHECK(diag.poses.back().y == doctest::Approx(0.1));
  CHECK(diag.poses.back().theta == doctest::Approx(std::numbers::pi / 4));

  const auto& rot = find(set, 0, 1, PrimitiveKind::Rotation);
  CHECK(rot.n() == 2);
  CHECK(rot.length == 0.0);
  CHECK(rot.end_offset == CellIndex{0, 0});
  CHECK(rot.poses.back().theta == heading_angle(1));
  CHECK(rot.delta_theta == doctest::Approx(std::atan2(1.0, 2.0)));
}

TEST_CASE("set structure and lattice closure") {
  const auto& set = default_set();
  for (int h = 0; h < kNumHeadings; ++h) {
    int forward = 0, rotations = 0;
    for (std::size_t i : set.by_heading[h]) {
      const auto& p = set.primitives[i];
      CHECK(p.start_heading == h);
      forward += p.kind == PrimitiveKind::Straight || p.kind == PrimitiveKind::Curved;
      rotations += p.kind == PrimitiveKind::Rotation;
    }
    CHECK(forward >= 1);
    CHECK(rotations == 2);
  }
  for (const auto& p : set.primitives) {
    CHECK(p.end_heading >= 0);
    CHECK(p.end_heading < kNumHeadings);
    CHECK(p.poses.front().x == 0.0);
    CHECK(p.poses.front().y == 0.0);
    CHECK(p.poses.front().theta == heading_angle(p.start_heading));
    CHECK(p.poses.back().theta == heading_angle(p.end_heading));
    CHECK(p.poses.back().x == p.end_offset.ix * 0.1);
    CHECK(p.poses.back().y == p.end_offset.iy * 0.1);
    for (std::size_t k = 1; k < p.poses.size(); ++k) {
      const double step = std::hypot(p.poses[k].x - p.poses[k - 1].x, p.poses[k].y - p.poses[k - 1].y);
      CHECK(step <= 0.05 + 1e-12);
    }
  }
}

TEST_CASE("curved primitives are tangent at both ends") {
  const auto& set = default_set();
  for (const auto& p : set.primitives) {
    if (p.kind != PrimitiveKind::Curved) continue;
    const double chord = std::hypot(p.end_offset.ix, p.end_offset.iy);
    CHECK(chord >= 3.0 - 1e-9);
    CHECK(chord <= 6.0 + 1e-9);
    const auto ctrl = turning_bezier(Eigen::Vector2d::Zero(), heading_angle(p.start_heading),
                                     Eigen::Vector2d(p.end_offset.ix * 0.1, p.end_offset.iy * 0.1),
                                     heading_angle(p.end_heading));
    const Eigen::Vector2d d0 = bezier_derivative(ctrl, 0.0);
    const Eigen::Vector2d d1 = bezier_derivative(ctrl, 1.0);
    CHECK(std::abs(angle_diff(std::atan2(d0.y(), d0.x()), heading_angle(p.start_heading))) < 1e-9);
    CHECK(std::abs(angle_diff(std::atan2(d1.y(), d1.x()), heading_angle(p.end_heading))) < 1e-9);
    CHECK(bezier_second_derivative(ctrl, 0.0).norm() < 1e-9);
    CHECK(bezier_second_derivative(ctrl, 1.0).norm() < 1e-9);
    CHECK(p.poses[1].theta != p.poses.front().theta);
  }
}

TEST_CASE("curvature bound violation names the primitive") {
  PrimitiveConfig cfg;
  cfg.max_curvature = 0.5;
  try {
    generate_primitives(0.1, 0.4, cfg);
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("heading 0 -> 1") != std::string::npos);
  }
  CHECK_THROWS_AS(generate_primitives(0.0, 0.4), PreconditionError);
}

TEST_CASE("backward primitives on request") {
  PrimitiveConfig cfg;
  cfg.allow_backward = true;
  const auto set = generate_primitives(0.1, 0.4, cfg);
  const auto& back = find(set, 3, 3, PrimitiveKind::Backward);
  CHECK(back.end_offset == CellIndex{-1, -2});
  CHECK(back.poses.back().theta == heading_angle(3));
}

TEST_CASE("swath properties") {
  const auto& set = default_set();
  for (const auto& p : set.primitives) {
    CHECK(std::binary_search(p.swath.begin(), p.swath.end(), CellIndex{0, 0}));
    CHECK(std::is_sorted(p.swath.begin(), p.swath.end()));
    CHECK(std::adjacent_find(p.swath.begin(), p.swath.end()) == p.swath.end());
  }
  const auto& east = find(set, 0, 0, PrimitiveKind::Straight, 0.1);
  std::set<CellIndex> cells(east.swath.begin(), east.swath.end());
  for (const auto& c : east.swath) CHECK(cells.count({c.ix, -c.iy}) == 1);
  // 0.8 m square centred on (0,0) and (0.1,0): x in [-4, 5], y in [-4, 4].
  CHECK(east.swath.size() == 10 * 9);

  // Headings 0 and 4 are a quarter turn apart; their swaths rotate together.
  const auto& north = find(set, 4, 4, PrimitiveKind::Straight, 0.3);
  const auto& east3 = find(set, 0, 0, PrimitiveKind::Straight, 0.3);
  std::set<CellIndex> rotated;
  for (const auto& c : east3.swath) rotated.insert({-c.iy, c.ix});
  CHECK(rotated == std::set<CellIndex>(north.swath.begin(), north.swath.end()));
}

TEST_CASE("swath is translation invariant") {
  const auto& set = default_set();
  for (std::size_t i = 0; i < set.primitives.size(); i += 5) {
    const auto& p = set.primitives[i];
    for (const CellIndex shift : {CellIndex{3, -2}, CellIndex{-17, 40}, CellIndex{250, 125}}) {
      std::vector<Pose> moved = p.poses;
      for (auto& q : moved) {
        q.x += shift.ix * 0.1;
        q.y += shift.iy * 0.1;
      }
      std::vector<CellIndex> expected;
      for (const auto& c : p.swath) expected.push_back({c.ix + shift.ix, c.iy + shift.iy});
      CHECK(sweep_footprint(moved, 0.4, 0.1) == expected);
    }
  }
}

TEST_CASE("rotation swaths sweep the circumscribed disc") {
  const auto& set = default_set();
  std::set<CellIndex> sweep;
  for (const auto& p : set.primitives)
    if (p.kind == PrimitiveKind::Rotation) sweep.insert(p.swath.begin(), p.swath.end());
  const double r = 0.4 * std::sqrt(2.0), h = 0.05;
  // Penetration depth of the disc into the cell square.
  auto depth = [&](CellIndex c) {
    const double cx = std::max(0.0, std::abs(c.ix * 0.1) - h);
    const double cy = std::max(0.0, std::abs(c.iy * 0.1) - h);
    return r - std::hypot(cx, cy);
  };
  for (int y = -8; y <= 8; ++y) {
    for (int x = -8; x <= 8; ++x) {
      const CellIndex c{x, y};
      if (depth(c) > 1e-3) CHECK(sweep.count(c) == 1);
      if (depth(c) <= 0.0) CHECK(sweep.count(c) == 0);
    }
  }
}

TEST_CASE("save and load round trip") {
  const auto& set = default_set();
  std::stringstream buf;
  save_primitives(set, buf);
  const PrimitiveSet back = load_primitives(buf);
  CHECK(back == set);
  CHECK(back.r_c == set.r_c);
  for (std::size_t i = 0; i < set.primitives.size(); ++i) {
    CHECK(back.primitives[i].length == set.primitives[i].length);
    CHECK(back.primitives[i].kind == set.primitives[i].kind);
  }
}

TEST_CASE("load errors") {
  std::stringstream full;
  save_primitives(default_set(), full);
  const std::string text = full.str();
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_primitives(truncated), ParseError);
  std::istringstream version("version 2\n");
  try {
    load_primitives(version);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("hand-written file") {
  std::istringstream in(
      "version 1\nresolution 0.1\nnum_headings 16\nfootprint 0.4\nnum_primitives 1\n"
      "primitive\nstart_heading 2\nend_heading 2\nn 3\n0 0 0.78539816339744828\n0.05 0.05 0.78539816339744828\n"
      "0.1 0.1 0.78539816339744828\nswath 2\n0 0\n1 1\n");
  const PrimitiveSet s = load_primitives(in);
  REQUIRE(s.primitives.size() == 1);
  const auto& p = s.primitives[0];
  CHECK(p.start_heading == 2);
  CHECK(p.n() == 3);
  CHECK(p.poses[1].x == 0.05);
  CHECK(p.end_offset == CellIndex{1, 1});
  CHECK(p.swath == std::vector<CellIndex>{{0, 0}, {1, 1}});
  CHECK(p.kind == PrimitiveKind::Straight);
  CHECK(s.by_heading[2] == std::vector<std::size_t>{0});
}
