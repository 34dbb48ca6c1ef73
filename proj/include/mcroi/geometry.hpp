#pragma once

#include <compare>
#include <set>
#include <utility>
#include <vector>

namespace mcroi {

struct FrameSpec {
  int camera_id = 0;
  int width_px = 0;
  int height_px = 0;
  int tile_size_px = 0;

  bool operator==(const FrameSpec&) const = default;
};

// Axis-aligned box in pixel coordinates, half-open:
// [left, left+width) x [top, top+height). Abutting boxes do not intersect.
struct BBox {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }

  bool operator==(const BBox&) const = default;
};

// Fixed tiling of one camera frame. Tile indices are 1-based and row-major:
// left-to-right within a row, rows top-to-bottom. Edge tiles are clipped to
// the frame when width/height is not a multiple of tile_size.
struct TileGrid {
  FrameSpec frame;
  int cols = 0;
  int rows = 0;

  int tile_count() const { return cols * rows; }
  bool valid_index(int tile_index) const {
    return tile_index >= 1 && tile_index <= tile_count();
  }

  // row/col are 0-based
  int index_at(int row, int col) const { return row * cols + col + 1; }
  std::pair<int, int> row_col(int tile_index) const {
    int z = tile_index - 1;
    return {z / cols, z % cols};
  }

  // pixel rectangle of a tile (edge tiles clipped)
  BBox tile_rect(int tile_index) const;
  long long tile_pixel_area(int tile_index) const;
};

struct TileRef {
  int camera_id = 0;
  int tile_index = 0;

  auto operator<=>(const TileRef&) const = default;
};

// Selected tiles of one camera; tiles are 1-based grid indices.
struct RoiMask {
  int camera_id = 0;
  std::set<int> tiles;

  bool operator==(const RoiMask&) const = default;
};

TileGrid build_grid(const FrameSpec& frame);

// Least set of tiles covering the box: exactly the tiles whose half-open
// pixel rectangles intersect the box interior. The box is clamped to the
// frame first; a box fully outside the frame is an error.
// Returns sorted 1-based indices.
std::vector<int> appearance_region(const TileGrid& grid, const BBox& box);

// Fraction of frame pixel area covered by the mask (edge tiles at true size).
double mask_area_fraction(const TileGrid& grid, const RoiMask& mask);

}  // namespace mcroi
