#include "mcroi/trace.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "mcroi/error.hpp"

namespace mcroi {

const FrameSpec* Trace::find_camera(int camera_id) const {
  for (const auto& cam : cameras) {
    if (cam.camera_id == camera_id) return &cam;
  }
  return nullptr;
}

void Trace::normalize() {
  std::stable_sort(records.begin(), records.end(),
                   [](const DetectionRecord& a, const DetectionRecord& b) {
                     if (a.frame_index != b.frame_index) return a.frame_index < b.frame_index;
                     return a.camera_id < b.camera_id;
                   });
  if (records.empty()) {
    first_frame = 0;
    last_frame = -1;
  } else {
    first_frame = records.front().frame_index;
    last_frame = records.back().frame_index;
  }
}

int64_t Trace::max_reid_id() const {
  int64_t m = -1;
  for (const auto& r : records) m = std::max(m, r.reid_id);
  return m;
}

std::map<int, TileGrid> grids_for(const Trace& trace, int tile_size_override) {
  std::map<int, TileGrid> grids;
  for (const auto& cam : trace.cameras) {
    FrameSpec spec = cam;
    if (tile_size_override > 0) spec.tile_size_px = tile_size_override;
    grids.emplace(cam.camera_id, build_grid(spec));
  }
  return grids;
}

size_t AssociationTable::total_region_entries() const {
  size_t n = 0;
  for (const auto& [frame, objects] : frames) {
    (void)frame;
    for (const auto& obj : objects) n += obj.regions.size();
  }
  return n;
}

AssociationTable build_lookup_table(const Trace& trace,
                                    const std::map<int, TileGrid>& grids) {
  AssociationTable table;

  // frame -> reid -> records, in trace order
  std::map<int, std::map<int64_t, std::vector<const DetectionRecord*>>> by_frame;
  for (const auto& rec : trace.records) {
    if (!grids.count(rec.camera_id)) {
      throw Error(ErrorKind::InvalidInput,
                  "record references camera " + std::to_string(rec.camera_id) +
                      " with no grid");
    }
    by_frame[rec.frame_index][rec.reid_id].push_back(&rec);
  }

  for (const auto& [frame, by_id] : by_frame) {
    std::vector<TableObject>& objects = table.frames[frame];
    for (const auto& [reid, recs] : by_id) {
      // First record per camera joins the multi-camera object; later records
      // from an already-seen camera become distinct singleton objects.
      TableObject primary;
      primary.object_id = reid;
      primary.dup_index = 0;
      int dup_counter = 0;
      std::vector<TableObject> dups;
      for (const DetectionRecord* rec : recs) {
        const TileGrid& grid = grids.at(rec->camera_id);
        std::vector<int> region = appearance_region(grid, rec->box);
        bool camera_taken = false;
        for (const auto& [cam, tiles] : primary.regions) {
          (void)tiles;
          if (cam == rec->camera_id) {
            camera_taken = true;
            break;
          }
        }
        if (!camera_taken) {
          primary.regions.emplace_back(rec->camera_id, std::move(region));
        } else {
          TableObject dup;
          dup.object_id = reid;
          dup.dup_index = ++dup_counter;
          dup.regions.emplace_back(rec->camera_id, std::move(region));
          dups.push_back(std::move(dup));
        }
      }
      std::sort(primary.regions.begin(), primary.regions.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      objects.push_back(std::move(primary));
      for (auto& d : dups) objects.push_back(std::move(d));
    }
    std::sort(objects.begin(), objects.end(),
              [](const TableObject& a, const TableObject& b) {
                if (a.object_id != b.object_id) return a.object_id < b.object_id;
                return a.dup_index < b.dup_index;
              });
  }
  return table;
}

PairLabelCounts label_pairwise(const Trace& trace, int source_camera,
                               int dest_camera) {
  PairLabelCounts counts;
  counts.source_camera = source_camera;
  counts.dest_camera = dest_camera;

  std::map<int, std::vector<const DetectionRecord*>> src_by_frame, dst_by_frame;
  for (const auto& rec : trace.records) {
    if (rec.camera_id == source_camera || rec.camera_id == dest_camera) {
      if (!rec.gt_id.has_value()) {
        throw Error(ErrorKind::InvalidInput,
                    "label_pairwise requires ground-truth ids on cameras " +
                        std::to_string(source_camera) + " and " +
                        std::to_string(dest_camera));
      }
    }
    if (rec.camera_id == source_camera) src_by_frame[rec.frame_index].push_back(&rec);
    if (rec.camera_id == dest_camera) dst_by_frame[rec.frame_index].push_back(&rec);
  }

  for (const auto& [frame, sources] : src_by_frame) {
    auto it = dst_by_frame.find(frame);
    const std::vector<const DetectionRecord*>* dests =
        it == dst_by_frame.end() ? nullptr : &it->second;
    for (const DetectionRecord* s : sources) {
      bool has_counterpart = false;   // same ground-truth object visible in dest
      bool reid_match = false;        // some dest record shares the reid
      bool correct_match = false;     // reid match that is the right object
      if (dests) {
        for (const DetectionRecord* d : *dests) {
          if (*d->gt_id == *s->gt_id) has_counterpart = true;
          if (d->reid_id == s->reid_id) {
            reid_match = true;
            if (*d->gt_id == *s->gt_id) correct_match = true;
          }
        }
      }
      if (has_counterpart) {
        if (correct_match) {
          counts.tp++;
        } else if (reid_match) {
          counts.fp++;  // positive object matched to a wrong object
        } else {
          counts.fn++;
        }
      } else {
        if (reid_match) {
          counts.fp++;  // negative object matched to something
        } else {
          counts.tn++;
        }
      }
    }
  }
  return counts;
}

}  // namespace mcroi
