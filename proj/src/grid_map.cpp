#include "g2vd/grid_map.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <string>

#include "g2vd/error.hpp"

namespace g2vd {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Eigen::Vector2d origin,
                             CellState fill)
    : width_(width), height_(height), resolution_(resolution), origin_(std::move(origin)) {
  if (width < 1 || height < 1) throw StructuralError("grid dimensions must be positive");
  if (!(resolution > 0.0)) throw StructuralError("grid resolution must be positive");
  cells_.assign(static_cast<std::size_t>(width) * height, fill);
}

std::size_t OccupancyGrid::count(CellState s) const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), s));
}

std::filesystem::path sidecar_path(const std::filesystem::path& pgm_path) {
  auto p = pgm_path;
  p.replace_extension(".yaml");
  return p;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw ParseError("trailing characters in number '" + text + "'", line);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("expected a number, got '" + text + "'", line);
  }
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
// `line` tracks the 1-based line of the returned token.
std::string next_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos, std::size_t& line) {
  while (pos < bytes.size()) {
    char ch = static_cast<char>(bytes[pos]);
    if (ch == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      if (ch == '\n') ++line;
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
    tok.push_back(static_cast<char>(bytes[pos++]));
  }
  if (tok.empty()) throw ParseError("unexpected end of PGM header", line);
  return tok;
}

int parse_header_int(const std::string& tok, std::size_t line, const char* what) {
  if (!std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw ParseError(std::string("invalid PGM ") + what + " '" + tok + "'", line);
  }
  try {
    return std::stoi(tok);
  } catch (const std::out_of_range&) {
    throw ParseError(std::string("PGM ") + what + " out of range", line);
  }
}

}  // namespace

MapMetadata load_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open map metadata " + path.string());
  MapMetadata meta;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'key: value'", line);
    auto key = trim(text.substr(0, colon));
    auto value = trim(text.substr(colon + 1));
    if (key == "resolution") {
      meta.resolution = parse_double(value, line);
    } else if (key == "origin_x") {
      meta.origin.x() = parse_double(value, line);
    } else if (key == "origin_y") {
      meta.origin.y() = parse_double(value, line);
    } else if (key == "negate") {
      meta.negate = parse_double(value, line) != 0.0;
    } else if (key == "occupied_thresh") {
      meta.occupied_thresh = parse_double(value, line);
    } else if (key == "free_thresh") {
      meta.free_thresh = parse_double(value, line);
    } else {
      throw ParseError("unknown metadata key '" + key + "'", line);
    }
  }
  if (!(meta.resolution > 0.0)) throw StructuralError("metadata resolution must be positive");
  if (meta.occupied_thresh > meta.free_thresh) {
    throw StructuralError("occupied_thresh must not exceed free_thresh");
  }
  return meta;
}

OccupancyGrid parse_pgm(const std::vector<std::uint8_t>& bytes, const MapMetadata& meta) {
  if (bytes.empty()) throw ParseError("empty PGM file", 1);
  std::size_t pos = 0;
  std::size_t line = 1;
  auto magic = next_token(bytes, pos, line);
  if (magic != "P5") throw ParseError("expected PGM magic 'P5', got '" + magic + "'", line);
  int width = parse_header_int(next_token(bytes, pos, line), line, "width");
  int height = parse_header_int(next_token(bytes, pos, line), line, "height");
  int maxval = parse_header_int(next_token(bytes, pos, line), line, "maxval");
  if (width < 1 || height < 1) throw ParseError("PGM dimensions must be positive", line);
  if (maxval < 1 || maxval > 65535) throw ParseError("PGM maxval must be in [1, 65535]", line);
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw ParseError("missing whitespace after PGM header", line);
  }
  ++pos;

  const std::size_t bpp = maxval > 255 ? 2 : 1;
  const std::size_t expected = static_cast<std::size_t>(width) * height * bpp;
  if (bytes.size() - pos != expected) {
    throw StructuralError("PGM payload has " + std::to_string(bytes.size() - pos) +
                          " bytes, header declares " + std::to_string(expected));
  }

  OccupancyGrid grid(width, height, meta.resolution, meta.origin);
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      std::size_t k = pos + (static_cast<std::size_t>(row) * width + col) * bpp;
      int value = bpp == 2 ? (bytes[k] << 8) | bytes[k + 1] : bytes[k];
      if (value > maxval) throw StructuralError("PGM pixel exceeds maxval");
      double frac = static_cast<double>(value) / maxval;
      if (meta.negate) frac = 1.0 - frac;
      CellState s = CellState::Unknown;
      if (frac <= meta.occupied_thresh) {
        s = CellState::Occupied;
      } else if (frac >= meta.free_thresh) {
        s = CellState::Free;
      }
      // Image row 0 is the top of the map.
      grid.set({col, height - 1 - row}, s);
    }
  }
  return grid;
}

OccupancyGrid load_map(const std::filesystem::path& pgm_path, const std::filesystem::path& sidecar) {
  auto meta = load_metadata(sidecar);
  std::ifstream in(pgm_path, std::ios::binary);
  if (!in) throw ParseError("cannot open map image " + pgm_path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes, meta);
}

OccupancyGrid load_map(const std::filesystem::path& pgm_path) {
  return load_map(pgm_path, sidecar_path(pgm_path));
}

void save_map(const OccupancyGrid& grid, const std::filesystem::path& pgm_path) {
  {
    std::ofstream out(pgm_path, std::ios::binary);
    if (!out) throw Error("cannot write map image " + pgm_path.string());
    out << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
    for (int row = 0; row < grid.height(); ++row) {
      for (int col = 0; col < grid.width(); ++col) {
        char v = 0;
        switch (grid.at({col, grid.height() - 1 - row})) {
          case CellState::Free: v = static_cast<char>(255); break;
          case CellState::Occupied: v = 0; break;
          case CellState::Unknown: v = static_cast<char>(205); break;
        }
        out.put(v);
      }
    }
  }
  std::ofstream meta(sidecar_path(pgm_path));
  if (!meta) throw Error("cannot write map metadata for " + pgm_path.string());
  meta << std::setprecision(17);
  meta << "resolution: " << grid.resolution() << "\n"
       << "origin_x: " << grid.origin().x() << "\n"
       << "origin_y: " << grid.origin().y() << "\n"
       << "negate: 0\n"
       << "occupied_thresh: 0.5\n"
       << "free_thresh: 0.95\n";
}

Eigen::Vector2d cell_to_world(const OccupancyGrid& grid, CellIndex c) {
  return grid.origin() + grid.resolution() * Eigen::Vector2d(c.ix + 0.5, c.iy + 0.5);
}

CellIndex world_to_cell(const OccupancyGrid& grid, const Eigen::Vector2d& p) {
  Eigen::Vector2d local = (p - grid.origin()) / grid.resolution();
  if (!local.allFinite()) throw RangeError("non-finite world point");
  CellIndex c{static_cast<int>(std::floor(local.x())), static_cast<int>(std::floor(local.y()))};
  if (local.x() < 0.0 || local.y() < 0.0 || !grid.in_bounds(c)) {
    std::ostringstream msg;
    msg << "world point (" << p.x() << ", " << p.y() << ") outside the map";
    throw RangeError(msg.str());
  }
  return c;
}

bool is_traversable(const OccupancyGrid& grid, CellIndex c, UnknownPolicy policy) {
  switch (grid.at(c)) {
    case CellState::Free: return true;
    case CellState::Occupied: return false;
    case CellState::Unknown: return policy == UnknownPolicy::Free;
  }
  return false;
}

}  // namespace g2vd
