#include "mcroi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcroi/error.hpp"

namespace mcroi {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

void check_grid(const TileGrid& grid) {
  if (grid.cols <= 0 || grid.rows <= 0) {
    throw Error(ErrorKind::InvalidInput, "empty tile grid");
  }
}

}  // namespace

BBox TileGrid::tile_rect(int tile_index) const {
  auto [row, col] = row_col(tile_index);
  int t = frame.tile_size_px;
  int x0 = col * t;
  int y0 = row * t;
  int x1 = std::min((col + 1) * t, frame.width_px);
  int y1 = std::min((row + 1) * t, frame.height_px);
  return BBox{static_cast<double>(x0), static_cast<double>(y0),
              static_cast<double>(x1 - x0), static_cast<double>(y1 - y0)};
}

long long TileGrid::tile_pixel_area(int tile_index) const {
  BBox r = tile_rect(tile_index);
  return static_cast<long long>(r.width) * static_cast<long long>(r.height);
}

TileGrid build_grid(const FrameSpec& frame) {
  if (frame.width_px <= 0 || frame.height_px <= 0 || frame.tile_size_px <= 0) {
    throw Error(ErrorKind::InvalidInput,
                "frame dimensions and tile size must be positive (camera " +
                    std::to_string(frame.camera_id) + ")");
  }
  TileGrid grid;
  grid.frame = frame;
  grid.cols = ceil_div(frame.width_px, frame.tile_size_px);
  grid.rows = ceil_div(frame.height_px, frame.tile_size_px);
  return grid;
}

std::vector<int> appearance_region(const TileGrid& grid, const BBox& box) {
  check_grid(grid);
  if (!(box.width > 0.0) || !(box.height > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "bounding box has non-positive size");
  }

  // clamp to frame bounds; detector boxes routinely overflow by a few pixels
  double x0 = std::max(box.left, 0.0);
  double y0 = std::max(box.top, 0.0);
  double x1 = std::min(box.right(), static_cast<double>(grid.frame.width_px));
  double y1 = std::min(box.bottom(), static_cast<double>(grid.frame.height_px));
  if (!(x0 < x1) || !(y0 < y1)) {
    throw Error(ErrorKind::InvalidInput, "bounding box does not intersect the frame");
  }

  int t = grid.frame.tile_size_px;
  int col0 = static_cast<int>(std::floor(x0 / t));
  int col1 = static_cast<int>(std::ceil(x1 / t)) - 1;
  int row0 = static_cast<int>(std::floor(y0 / t));
  int row1 = static_cast<int>(std::ceil(y1 / t)) - 1;
  col0 = std::clamp(col0, 0, grid.cols - 1);
  col1 = std::clamp(col1, 0, grid.cols - 1);
  row0 = std::clamp(row0, 0, grid.rows - 1);
  row1 = std::clamp(row1, 0, grid.rows - 1);

  std::vector<int> tiles;
  tiles.reserve(static_cast<size_t>(row1 - row0 + 1) * (col1 - col0 + 1));
  for (int r = row0; r <= row1; ++r) {
    for (int c = col0; c <= col1; ++c) {
      tiles.push_back(grid.index_at(r, c));
    }
  }
  return tiles;
}

double mask_area_fraction(const TileGrid& grid, const RoiMask& mask) {
  check_grid(grid);
  long long covered = 0;
  for (int tile : mask.tiles) {
    if (!grid.valid_index(tile)) {
      throw Error(ErrorKind::InvalidInput,
                  "tile index " + std::to_string(tile) + " out of range for camera " +
                      std::to_string(grid.frame.camera_id));
    }
    covered += grid.tile_pixel_area(tile);
  }
  long long total = static_cast<long long>(grid.frame.width_px) * grid.frame.height_px;
  return static_cast<double>(covered) / static_cast<double>(total);
}

}  // namespace mcroi
