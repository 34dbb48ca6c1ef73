#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mcroi/geometry.hpp"

namespace mcroi {

struct DetectionRecord {
  int camera_id = 0;
  int frame_index = 0;  // 0-based; timestamp = first frame time + frame_index / fps
  BBox box;
  int64_t reid_id = 0;
  std::optional<int64_t> gt_id;  // ground-truth identity; present in labeled traces

  bool operator==(const DetectionRecord&) const = default;
};

struct Trace {
  double frame_rate_hz = 0.0;
  std::vector<FrameSpec> cameras;
  std::vector<DetectionRecord> records;  // sorted by (frame_index, camera_id)
  int first_frame = 0;
  int last_frame = -1;  // inclusive; last < first means empty window

  const FrameSpec* find_camera(int camera_id) const;
  // stable-sorts records by (frame_index, camera_id) and refreshes the window
  void normalize();
  int64_t max_reid_id() const;
};

// grids for every camera of a trace, keyed by camera id; tile_size_override
// replaces the per-camera tile size when > 0
std::map<int, TileGrid> grids_for(const Trace& trace, int tile_size_override = 0);

// One object at one timestamp with its appearance regions across cameras.
// dup_index > 0 marks extra same-camera detections that shared a reid_id and
// were split into distinct objects.
struct TableObject {
  int64_t object_id = 0;
  int dup_index = 0;
  // (camera_id, sorted tile indices), at most one entry per camera,
  // ordered by camera_id
  std::vector<std::pair<int, std::vector<int>>> regions;
};

struct AssociationTable {
  // frame_index -> objects sorted by (object_id, dup_index)
  std::map<int, std::vector<TableObject>> frames;

  size_t total_region_entries() const;
};

struct PairLabelCounts {
  int source_camera = 0;
  int dest_camera = 0;
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t tn = 0;

  int64_t total() const { return tp + fp + fn + tn; }
};

// Build the per-timestamp cross-camera region association table.
// Records sharing a reid_id at one frame become one object; extra detections
// with the same reid_id in the same camera are split into distinct objects.
AssociationTable build_lookup_table(const Trace& trace,
                                    const std::map<int, TileGrid>& grids);

// Label every source-camera detection TP/FP/FN/TN against the destination
// camera using ground-truth ids. All records of both cameras must carry gt_id.
PairLabelCounts label_pairwise(const Trace& trace, int source_camera,
                               int dest_camera);

}  // namespace mcroi
