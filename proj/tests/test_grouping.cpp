#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <vector>

#include "mcroi/error.hpp"
#include "mcroi/grouping.hpp"
#include "mcroi/rng.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace mcroi;

namespace {

CellMask mask_from_rows(const std::vector<std::string>& rows) {
  CellMask m;
  m.rows = static_cast<int>(rows.size());
  m.cols = static_cast<int>(rows[0].size());
  for (const auto& row : rows) {
    for (char c : row) m.cells.push_back(c == '#' ? 1 : 0);
  }
  return m;
}

RoiMask roimask_of(const CellMask& cells, const TileGrid& grid) {
  RoiMask mask;
  mask.camera_id = grid.frame.camera_id;
  for (int r = 0; r < cells.rows; ++r) {
    for (int c = 0; c < cells.cols; ++c) {
      if (cells.at(r, c)) mask.tiles.insert(grid.index_at(r, c));
    }
  }
  return mask;
}

// exhaustive minimum rectangle partition for masks of <= 20 cells
int min_rectangle_partition(const CellMask& mask) {
  std::vector<std::pair<int, int>> cells;
  for (int r = 0; r < mask.rows; ++r) {
    for (int c = 0; c < mask.cols; ++c) {
      if (mask.at(r, c)) cells.emplace_back(r, c);
    }
  }
  int n = static_cast<int>(cells.size());
  REQUIRE(n <= 20);
  auto cell_bit = [&](int r, int c) {
    for (int i = 0; i < n; ++i) {
      if (cells[i] == std::make_pair(r, c)) return i;
    }
    return -1;
  };
  // all all-true rectangles as cell bitmasks
  std::vector<uint32_t> rects;
  for (int r0 = 0; r0 < mask.rows; ++r0) {
    for (int c0 = 0; c0 < mask.cols; ++c0) {
      for (int r1 = r0; r1 < mask.rows; ++r1) {
        for (int c1 = c0; c1 < mask.cols; ++c1) {
          uint32_t bits = 0;
          bool ok = true;
          for (int r = r0; r <= r1 && ok; ++r) {
            for (int c = c0; c <= c1; ++c) {
              int b = mask.at(r, c) ? cell_bit(r, c) : -1;
              if (b < 0) {
                ok = false;
                break;
              }
              bits |= 1u << b;
            }
          }
          if (ok) rects.push_back(bits);
        }
      }
    }
  }
  std::vector<int> best(1u << n, n + 1);
  best[0] = 0;
  for (uint32_t s = 1; s < (1u << n); ++s) {
    int low = __builtin_ctz(s);
    for (uint32_t r : rects) {
      if ((r & (1u << low)) && (r & s) == r) {
        best[s] = std::min(best[s], 1 + best[s & ~r]);
      }
    }
  }
  return best[(1u << n) - 1];
}

}  // namespace

TEST_CASE("full grid is a single rectangle") {
  CellMask m = mask_from_rows({"####", "####", "####"});
  GridRect r = largest_rectangle(m);
  CHECK(r.col0 == 0);
  CHECK(r.row0 == 0);
  CHECK(r.cols == 4);
  CHECK(r.rows == 3);

  CellMask empty = mask_from_rows({"....", "...."});
  CHECK_THROWS_AS(largest_rectangle(empty), Error);
}

TEST_CASE("L-shaped mask: block beats arm") {
  // 4x3 block plus a 1x4 arm below its first column
  CellMask m = mask_from_rows({
      "####.",
      "####.",
      "####.",
      "#....",
      "#....",
      "#....",
      "#....",
  });
  GridRect r = largest_rectangle(m);
  CHECK(r.area() == 12);
  CHECK(r.col0 == 0);
  CHECK(r.row0 == 0);
  CHECK(r.cols == 4);
  CHECK(r.rows == 3);
}

TEST_CASE("largest rectangle matches the quartic scan on random grids") {
  Rng rng(2468);
  for (int iter = 0; iter < 300; ++iter) {
    CellMask m = gen::random_cell_mask(rng, 8, 8, 0.55);
    if (!m.any()) continue;
    GridRect fast = largest_rectangle(m);
    GridRect slow = oracle::max_rectangle_scan(m);
    CHECK(fast.area() == slow.area());
    CHECK(fast == slow);  // tie-break agreement, not just area
  }
}

TEST_CASE("grouping the worked 16-tile mask gives 3 rectangles") {
  // 12-tile block with two 2-tile arms; mirrors the greedy merge walkthrough
  CellMask cells = mask_from_rows({
      ".####.",
      ".#####",
      ".#####",
      ".##...",
  });
  TileGrid grid = build_grid(FrameSpec{1, 6 * 64, 4 * 64, 64});
  RoiMask mask = roimask_of(cells, grid);
  CHECK(mask.tiles.size() == 16);

  Grouping g = group_tiles(mask, grid);
  REQUIRE(g.rects.size() == 3);
  CHECK(g.rects[0].area() == 12);  // the 4x3 block
  CHECK(g.rects[1].area() + g.rects[2].area() == 4);
  // areas non-increasing in extraction order
  CHECK(g.rects[0].area() >= g.rects[1].area());
  CHECK(g.rects[1].area() >= g.rects[2].area());
}

TEST_CASE("grouping partitions the mask exactly") {
  Rng rng(13579);
  TileGrid grid = build_grid(FrameSpec{1, 10 * 64, 8 * 64, 64});
  for (int iter = 0; iter < 150; ++iter) {
    CellMask cells = gen::random_cell_mask(rng, 10, 8, rng.uniform(0.1, 0.9));
    RoiMask mask = roimask_of(cells, grid);
    Grouping g = group_tiles(mask, grid);

    std::map<int, int> covered;
    int area = 0;
    for (const GridRect& r : g.rects) {
      area += r.area();
      for (int row = r.row0; row < r.row0 + r.rows; ++row) {
        for (int col = r.col0; col < r.col0 + r.cols; ++col) {
          covered[grid.index_at(row, col)]++;
        }
      }
    }
    CHECK(area == static_cast<int>(mask.tiles.size()));
    for (const auto& [tile, count] : covered) {
      CHECK(count == 1);
      CHECK(mask.tiles.count(tile) == 1);
    }
    // non-increasing extraction areas
    for (size_t i = 1; i < g.rects.size(); ++i) {
      CHECK(g.rects[i - 1].area() >= g.rects[i].area());
    }
    CHECK(g.rects.size() <= mask.tiles.size());
  }
}

TEST_CASE("singleton-only masks need one rect per tile") {
  // diagonal: no two tiles are rectangle-compatible neighbors
  CellMask cells = mask_from_rows({
      "#...",
      ".#..",
      "..#.",
      "...#",
  });
  TileGrid grid = build_grid(FrameSpec{1, 4 * 64, 4 * 64, 64});
  RoiMask mask = roimask_of(cells, grid);
  Grouping g = group_tiles(mask, grid);
  CHECK(g.rects.size() == mask.tiles.size());
}

TEST_CASE("greedy rect count vs exhaustive minimum partition on small masks") {
  Rng rng(8642);
  int optimal_hits = 0, total = 0;
  for (int iter = 0; iter < 40; ++iter) {
    CellMask cells = gen::random_cell_mask(rng, 4, 4, 0.6);
    int set_cells = 0;
    for (auto c : cells.cells) set_cells += c;
    if (set_cells == 0 || set_cells > 12) continue;
    TileGrid grid = build_grid(FrameSpec{1, 4 * 64, 4 * 64, 64});
    RoiMask mask = roimask_of(cells, grid);
    Grouping g = group_tiles(mask, grid);
    int greedy_count = static_cast<int>(g.rects.size());
    int optimal = min_rectangle_partition(cells);
    CHECK(greedy_count >= optimal);  // greedy is a heuristic, never better
    total++;
    if (greedy_count == optimal) optimal_hits++;
  }
  // recorded, not asserted: the greedy heuristic is usually but not provably optimal
  MESSAGE("greedy matched the optimal partition on ", optimal_hits, "/", total,
          " small masks");
}

TEST_CASE("rect pixel rectangles clip at ragged edges") {
  TileGrid grid = build_grid(FrameSpec{1, 200, 100, 64});  // 4 cols (last 8px), 2 rows
  GridRect rect{1, 3, 0, 1, 2};
  BBox px = rect_pixels(rect, grid);
  CHECK(px.left == 192);
  CHECK(px.width == 8);
  CHECK(px.height == 100);
}
