#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace g2vd {

enum class CellState : std::uint8_t { Free = 0, Occupied = 1, Unknown = 2 };

/// How Unknown cells are treated by traversability queries.
enum class UnknownPolicy { Obstacle, Free };

struct CellIndex {
  int ix = 0;
  int iy = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// 2-D occupancy grid. Row 0 is the bottom row in the world frame and `origin`
/// is the world position of the lower-left corner of cell (0,0).
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution,
                Eigen::Vector2d origin = Eigen::Vector2d::Zero(),
                CellState fill = CellState::Free);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Eigen::Vector2d& origin() const { return origin_; }
  std::size_t size() const { return cells_.size(); }

  bool in_bounds(CellIndex c) const {
    return c.ix >= 0 && c.iy >= 0 && c.ix < width_ && c.iy < height_;
  }
  int index(CellIndex c) const { return c.iy * width_ + c.ix; }
  CellIndex cell(int index) const { return {index % width_, index / width_}; }

  CellState at(CellIndex c) const { return cells_[index(c)]; }
  CellState at(int index) const { return cells_[index]; }
  void set(CellIndex c, CellState s) { cells_[index(c)] = s; }

  const std::vector<CellState>& cells() const { return cells_; }

  std::size_t count(CellState s) const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.0;
  Eigen::Vector2d origin_ = Eigen::Vector2d::Zero();
  std::vector<CellState> cells_;
};

/// Sidecar metadata accompanying a PGM map image.
struct MapMetadata {
  double resolution = 0.1;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  bool negate = false;
  /// Gray fraction at or below which a pixel is Occupied.
  double occupied_thresh = 0.5;
  /// Gray fraction at or above which a pixel is Free.
  double free_thresh = 0.95;
};

/// Sidecar path for a map image: same stem, ".yaml" extension.
std::filesystem::path sidecar_path(const std::filesystem::path& pgm_path);

MapMetadata load_metadata(const std::filesystem::path& path);

/// Reads a binary PGM ("P5") image and its sidecar. Throws ParseError on a
/// malformed header and StructuralError when the payload does not match it.
OccupancyGrid load_map(const std::filesystem::path& pgm_path);
OccupancyGrid load_map(const std::filesystem::path& pgm_path, const std::filesystem::path& sidecar);
OccupancyGrid parse_pgm(const std::vector<std::uint8_t>& bytes, const MapMetadata& meta);

/// Writes Free as 255, Occupied as 0 and Unknown as 205, plus the sidecar.
void save_map(const OccupancyGrid& grid, const std::filesystem::path& pgm_path);

Eigen::Vector2d cell_to_world(const OccupancyGrid& grid, CellIndex c);
CellIndex world_to_cell(const OccupancyGrid& grid, const Eigen::Vector2d& p);

bool is_traversable(const OccupancyGrid& grid, CellIndex c,
                    UnknownPolicy policy = UnknownPolicy::Obstacle);

}  // namespace g2vd
