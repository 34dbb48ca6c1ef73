#pragma once

#include <map>
#include <string>

#include "mcroi/cover.hpp"
#include "mcroi/filters.hpp"
#include "mcroi/geometry.hpp"
#include "mcroi/grouping.hpp"
#include "mcroi/sim.hpp"
#include "mcroi/trace.hpp"

namespace mcroi {

// Trace file: JSON lines. The first line is a header
//   {"frame_rate": <hz>, "cameras": [{camera_id, width_px, height_px, tile_size_px}...]}
// and every following line is one detection
//   {"camera": int, "frame": int, "bbox": [left, top, width, height],
//    "reid": int, "gt": int|null}
Trace load_trace(const std::string& path);
void save_trace(const Trace& trace, const std::string& path);

// Mask file: one document per deployment, tiles sorted ascending, 1-based:
//   {"cameras": [{camera_id, width_px, height_px, tile_size_px, cols, rows,
//                 tiles: [int...]}]}
struct MaskFile {
  std::map<int, TileGrid> grids;
  std::map<int, RoiMask> masks;
};
MaskFile load_masks(const std::string& path);
void save_masks(const std::map<int, TileGrid>& grids,
                const std::map<int, RoiMask>& masks, const std::string& path);

// Groups file: rectangles per camera in extraction order; px is the pixel
// rectangle of the group (edge tiles clipped):
//   {"cameras": [{camera_id, rects: [{col0,row0,cols,rows,px:[l,t,w,h]}...]}]}
std::map<int, Grouping> load_groups(const std::string& path);
void save_groups(const std::map<int, Grouping>& groupings,
                 const std::map<int, TileGrid>& grids, const std::string& path);

std::string filter_report_to_json(const FilterReport& report);
void save_filter_report(const FilterReport& report, const std::string& path);

// Cover instance dump for debugging and oracle cross-checks:
//   {"universe": [[cam,idx]...],
//    "demands": [{frame, object, alternatives: [[[cam,idx]...]...]}]}
CoverInstance load_instance(const std::string& path);
void save_instance(const CoverInstance& instance, const std::string& path);

SceneConfig load_scene_config(const std::string& path);
void save_scene_config(const SceneConfig& config, const std::string& path);

void save_error_log(const ErrorLog& log, const std::string& path);
ErrorLog load_error_log(const std::string& path);

std::string replay_report_to_json(const ReplayReport& report);
void save_replay_report(const ReplayReport& report, const std::string& path);

}  // namespace mcroi
