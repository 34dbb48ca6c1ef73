#include "mcroi/grouping.hpp"

#include <algorithm>

#include "mcroi/error.hpp"

namespace mcroi {

namespace {

// candidate preference: larger area, then top-most, left-most, wider
bool better(const GridRect& a, const GridRect& b) {
  if (a.area() != b.area()) return a.area() > b.area();
  if (a.row0 != b.row0) return a.row0 < b.row0;
  if (a.col0 != b.col0) return a.col0 < b.col0;
  return a.cols > b.cols;
}

}  // namespace

CellMask CellMask::from_mask(const RoiMask& mask, const TileGrid& grid) {
  CellMask m;
  m.cols = grid.cols;
  m.rows = grid.rows;
  m.cells.assign(static_cast<size_t>(grid.cols) * grid.rows, 0);
  for (int tile : mask.tiles) {
    if (!grid.valid_index(tile)) {
      throw Error(ErrorKind::InvalidInput, "mask tile out of grid bounds");
    }
    auto [row, col] = grid.row_col(tile);
    m.set(row, col, true);
  }
  return m;
}

bool CellMask::any() const {
  for (uint8_t c : cells) {
    if (c) return true;
  }
  return false;
}

GridRect largest_rectangle(const CellMask& mask) {
  if (!mask.any()) {
    throw Error(ErrorKind::InvalidInput, "largest_rectangle on an empty mask");
  }

  GridRect best{0, 0, 0, 0, 0};
  std::vector<int> heights(mask.cols, 0);
  std::vector<int> stack;
  stack.reserve(mask.cols + 1);

  for (int row = 0; row < mask.rows; ++row) {
    for (int col = 0; col < mask.cols; ++col) {
      heights[col] = mask.at(row, col) ? heights[col] + 1 : 0;
    }
    // classic histogram sweep; every inclusion-maximal rectangle whose
    // bottom row is `row` shows up as one popped candidate
    stack.clear();
    for (int col = 0; col <= mask.cols; ++col) {
      int h = col < mask.cols ? heights[col] : 0;
      while (!stack.empty() && heights[stack.back()] >= h) {
        int bar_h = heights[stack.back()];
        stack.pop_back();
        if (bar_h == 0) continue;
        int left = stack.empty() ? 0 : stack.back() + 1;
        GridRect cand{0, left, row - bar_h + 1, col - left, bar_h};
        if (better(cand, best)) best = cand;
      }
      stack.push_back(col);
    }
  }
  return best;
}

Grouping group_tiles(const RoiMask& mask, const TileGrid& grid) {
  Grouping grouping;
  grouping.camera_id = mask.camera_id;
  CellMask cells = CellMask::from_mask(mask, grid);
  while (cells.any()) {
    GridRect rect = largest_rectangle(cells);
    rect.camera_id = mask.camera_id;
    for (int r = rect.row0; r < rect.row0 + rect.rows; ++r) {
      for (int c = rect.col0; c < rect.col0 + rect.cols; ++c) {
        cells.set(r, c, false);
      }
    }
    grouping.rects.push_back(rect);
  }
  return grouping;
}

BBox rect_pixels(const GridRect& rect, const TileGrid& grid) {
  int t = grid.frame.tile_size_px;
  int x0 = rect.col0 * t;
  int y0 = rect.row0 * t;
  int x1 = std::min((rect.col0 + rect.cols) * t, grid.frame.width_px);
  int y1 = std::min((rect.row0 + rect.rows) * t, grid.frame.height_px);
  return BBox{static_cast<double>(x0), static_cast<double>(y0),
              static_cast<double>(x1 - x0), static_cast<double>(y1 - y0)};
}

}  // namespace mcroi
