#pragma once

#include <cstdint>
#include <vector>

#include "mcroi/geometry.hpp"

namespace mcroi {

// 2-D boolean tile map, row-major; rows/cols in tile units
struct CellMask {
  int cols = 0;
  int rows = 0;
  std::vector<uint8_t> cells;  // rows*cols entries

  static CellMask from_mask(const RoiMask& mask, const TileGrid& grid);

  bool at(int row, int col) const {
    return cells[static_cast<size_t>(row) * cols + col] != 0;
  }
  void set(int row, int col, bool v) {
    cells[static_cast<size_t>(row) * cols + col] = v ? 1 : 0;
  }
  bool any() const;
};

// Axis-aligned all-true rectangle in tile coordinates; row0/col0 are 0-based
// inclusive, extents in tiles.
struct GridRect {
  int camera_id = 0;
  int col0 = 0;
  int row0 = 0;
  int cols = 0;
  int rows = 0;

  int area() const { return cols * rows; }
  bool operator==(const GridRect&) const = default;
};

struct Grouping {
  int camera_id = 0;
  std::vector<GridRect> rects;  // extraction order
};

// Maximum-area all-true rectangle via the histogram/stack dynamic program.
// Ties: smallest row0, then col0, then the wider rectangle.
GridRect largest_rectangle(const CellMask& mask);

// Greedy partition: repeatedly extract the largest rectangle until the mask
// is exhausted. The rects partition the mask exactly.
Grouping group_tiles(const RoiMask& mask, const TileGrid& grid);

// pixel rectangle of a group (edge tiles clip to the frame)
BBox rect_pixels(const GridRect& rect, const TileGrid& grid);

}  // namespace mcroi
