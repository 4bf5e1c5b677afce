#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "g2vd/grid_map.hpp"

namespace fixtures {

inline g2vd::OccupancyGrid empty_grid(int w, int h, double res = 0.1) {
  return g2vd::OccupancyGrid(w, h, res, Eigen::Vector2d::Zero(), g2vd::CellState::Free);
}

inline void wall_column(g2vd::OccupancyGrid& g, int ix) {
  for (int y = 0; y < g.height(); ++y) g.set({ix, y}, g2vd::CellState::Occupied);
}

inline void wall_row(g2vd::OccupancyGrid& g, int iy) {
  for (int x = 0; x < g.width(); ++x) g.set({x, iy}, g2vd::CellState::Occupied);
}

inline void box(g2vd::OccupancyGrid& g, int x0, int y0, int x1, int y1) {
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) g.set({x, y}, g2vd::CellState::Occupied);
}

inline void border(g2vd::OccupancyGrid& g) {
  wall_column(g, 0);
  wall_column(g, g.width() - 1);
  wall_row(g, 0);
  wall_row(g, g.height() - 1);
}

inline g2vd::OccupancyGrid random_grid(int w, int h, int obstacles, std::uint64_t seed) {
  auto g = empty_grid(w, h);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < obstacles; ++k) {
    g.set({static_cast<int>(rng() % w), static_cast<int>(rng() % h)}, g2vd::CellState::Occupied);
  }
  return g;
}

inline std::vector<std::uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace fixtures
