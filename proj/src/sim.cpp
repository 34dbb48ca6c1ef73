#include "mcroi/sim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "mcroi/error.hpp"
#include "mcroi/rng.hpp"

namespace mcroi {

double Homography::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
  double d = det();
  if (std::abs(d) <= 1e-9) {
    throw Error(ErrorKind::InvalidInput, "homography is not invertible");
  }
  Homography inv;
  inv.m[0] = (m[4] * m[8] - m[5] * m[7]) / d;
  inv.m[1] = (m[2] * m[7] - m[1] * m[8]) / d;
  inv.m[2] = (m[1] * m[5] - m[2] * m[4]) / d;
  inv.m[3] = (m[5] * m[6] - m[3] * m[8]) / d;
  inv.m[4] = (m[0] * m[8] - m[2] * m[6]) / d;
  inv.m[5] = (m[2] * m[3] - m[0] * m[5]) / d;
  inv.m[6] = (m[3] * m[7] - m[4] * m[6]) / d;
  inv.m[7] = (m[1] * m[6] - m[0] * m[7]) / d;
  inv.m[8] = (m[0] * m[4] - m[1] * m[3]) / d;
  return inv;
}

Vec2 project_ground_to_camera(const Homography& h, const Vec2& p) {
  double w = h.m[6] * p.x + h.m[7] * p.y + h.m[8];
  if (std::abs(w) <= 1e-9) {
    throw Error(ErrorKind::InvalidInput, "point projects to infinity");
  }
  return Vec2{(h.m[0] * p.x + h.m[1] * p.y + h.m[2]) / w,
              (h.m[3] * p.x + h.m[4] * p.y + h.m[5]) / w};
}

namespace {

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  bool inside = false;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
      double x_cross = poly[j].x + (p.y - poly[j].y) / (poly[i].y - poly[j].y) *
                                       (poly[i].x - poly[j].x);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

struct Polyline {
  std::vector<Vec2> pts;
  std::vector<double> cumlen;  // cumlen[i] = length up to pts[i]

  explicit Polyline(const std::vector<Vec2>& waypoints) : pts(waypoints) {
    cumlen.resize(pts.size(), 0.0);
    for (size_t i = 1; i < pts.size(); ++i) {
      double dx = pts[i].x - pts[i - 1].x;
      double dy = pts[i].y - pts[i - 1].y;
      cumlen[i] = cumlen[i - 1] + std::sqrt(dx * dx + dy * dy);
    }
  }

  double total() const { return cumlen.empty() ? 0.0 : cumlen.back(); }

  Vec2 at(double dist) const {
    if (dist <= 0) return pts.front();
    if (dist >= total()) return pts.back();
    size_t i = 1;
    while (cumlen[i] < dist) ++i;
    double seg = cumlen[i] - cumlen[i - 1];
    double t = seg > 0 ? (dist - cumlen[i - 1]) / seg : 0.0;
    return Vec2{pts[i - 1].x + t * (pts[i].x - pts[i - 1].x),
                pts[i - 1].y + t * (pts[i].y - pts[i - 1].y)};
  }
};

void validate_scene(const SceneConfig& config) {
  if (config.cameras.empty()) {
    throw Error(ErrorKind::InvalidInput, "scene has no cameras");
  }
  if (config.duration_frames < 1 || config.frame_rate_hz <= 0) {
    throw Error(ErrorKind::InvalidInput, "scene duration/frame rate invalid");
  }
  if (config.object_count > 0 && config.paths.empty()) {
    throw Error(ErrorKind::InvalidInput, "objects configured but no paths");
  }
  for (const auto& cam : config.cameras) {
    if (cam.visible_polygon.size() < 3) {
      throw Error(ErrorKind::InvalidInput, "camera visible polygon needs >= 3 points");
    }
    cam.ground_to_pixel.inverse();  // invertibility check
    build_grid(cam.frame);          // frame spec check
  }
  for (const auto& rates : config.error_rates) {
    if (rates.fp_rate < 0 || rates.fp_rate > 1 || rates.fn_rate < 0 || rates.fn_rate > 1) {
      throw Error(ErrorKind::InvalidInput, "error rates must lie in [0, 1]");
    }
  }
  for (const auto& path : config.paths) {
    if (path.waypoints.size() < 2 || path.speed <= 0) {
      throw Error(ErrorKind::InvalidInput, "path needs >= 2 waypoints and positive speed");
    }
  }
}

}  // namespace

std::pair<Trace, ErrorLog> generate_scene(const SceneConfig& config) {
  validate_scene(config);

  Trace trace;
  trace.frame_rate_hz = config.frame_rate_hz;
  for (const auto& cam : config.cameras) trace.cameras.push_back(cam.frame);

  struct ObjectState {
    Polyline path;
    double speed;
    double start_s;
    double half_w;
    double half_h;
  };
  std::vector<ObjectState> objects;
  for (int i = 0; i < config.object_count; ++i) {
    Rng rng(Rng::mix(config.seed, 0xe11a5, static_cast<uint64_t>(i)));
    const MotionPath& path = config.paths[i % config.paths.size()];
    double speed = path.speed;
    if (config.speed_jitter > 0) {
      speed *= 1.0 + config.speed_jitter * (2.0 * rng.uniform() - 1.0);
    }
    double fw = config.footprint_width * path.footprint_scale;
    double fh = config.footprint_height * path.footprint_scale;
    if (config.footprint_jitter > 0) {
      // independent draws: keeps width/height features linearly independent
      fw *= 1.0 + config.footprint_jitter * (2.0 * rng.uniform() - 1.0);
      fh *= 1.0 + config.footprint_jitter * (2.0 * rng.uniform() - 1.0);
    }
    // entry times cover [-travel_time, spawn_window): objects already
    // mid-path at t=0 keep the traffic pattern stationary from the start
    Polyline line(path.waypoints);
    double start = 0.0;
    if (config.spawn_window_s > 0) {
      double travel = line.total() / speed;
      start = rng.uniform(-travel, config.spawn_window_s);
    }
    objects.push_back({std::move(line), speed, start, fw / 2.0, fh / 2.0});
  }

  for (int frame = 0; frame < config.duration_frames; ++frame) {
    double t = frame / config.frame_rate_hz;
    for (int i = 0; i < config.object_count; ++i) {
      const ObjectState& obj = objects[i];
      double progress = (t - obj.start_s) * obj.speed;
      if (progress < 0 || progress > obj.path.total()) continue;
      Vec2 pos = obj.path.at(progress);
      for (const auto& cam : config.cameras) {
        if (!point_in_polygon(pos, cam.visible_polygon)) continue;
        double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
        bool first = true;
        bool projectable = true;
        for (int corner = 0; corner < 4; ++corner) {
          Vec2 g{pos.x + (corner & 1 ? obj.half_w : -obj.half_w),
                 pos.y + (corner & 2 ? obj.half_h : -obj.half_h)};
          Vec2 px;
          try {
            px = project_ground_to_camera(cam.ground_to_pixel, g);
          } catch (const Error&) {
            projectable = false;
            break;
          }
          if (first) {
            min_x = max_x = px.x;
            min_y = max_y = px.y;
            first = false;
          } else {
            min_x = std::min(min_x, px.x);
            max_x = std::max(max_x, px.x);
            min_y = std::min(min_y, px.y);
            max_y = std::max(max_y, px.y);
          }
        }
        if (!projectable) continue;
        BBox box{min_x, min_y, max_x - min_x, max_y - min_y};
        if (!(box.width > 0) || !(box.height > 0)) continue;
        if (box.right() <= 0 || box.bottom() <= 0 ||
            box.left >= cam.frame.width_px || box.top >= cam.frame.height_px) {
          continue;  // projected outside this camera's frame
        }
        DetectionRecord rec;
        rec.camera_id = cam.frame.camera_id;
        rec.frame_index = frame;
        rec.box = box;
        rec.gt_id = i + 1;
        rec.reid_id = i + 1;
        trace.records.push_back(rec);
      }
    }
  }
  trace.normalize();

  // clean-geometry presence map: (frame, camera) -> gt ids
  std::map<std::pair<int, int>, std::set<int64_t>> present;
  for (const auto& rec : trace.records) {
    present[{rec.frame_index, rec.camera_id}].insert(*rec.gt_id);
  }

  ErrorLog log;
  std::vector<char> touched(trace.records.size(), 0);
  int64_t fresh = config.object_count + 1;
  for (const auto& rates : config.error_rates) {
    Rng rng(Rng::mix(config.seed, 0xfa11, Rng::mix(rates.source_camera, rates.dest_camera)));
    for (size_t idx = 0; idx < trace.records.size(); ++idx) {
      DetectionRecord& rec = trace.records[idx];
      if (rec.camera_id != rates.source_camera || touched[idx]) continue;
      auto it = present.find({rec.frame_index, rates.dest_camera});
      bool positive = it != present.end() && it->second.count(*rec.gt_id);
      if (positive) {
        if (rates.fn_rate > 0 && rng.bernoulli(rates.fn_rate)) {
          rec.reid_id = fresh++;
          touched[idx] = 1;
          log.push_back({"fn", rec.frame_index, rec.camera_id, *rec.gt_id,
                         rates.source_camera, rates.dest_camera, rec.reid_id});
        }
      } else {
        if (rates.fp_rate > 0 && rng.bernoulli(rates.fp_rate)) {
          std::vector<int64_t> candidates;
          if (it != present.end()) {
            for (int64_t gt : it->second) {
              if (gt != *rec.gt_id) candidates.push_back(gt);
            }
          }
          if (!candidates.empty()) {
            rec.reid_id = candidates[rng.uniform_int(static_cast<int>(candidates.size()))];
            touched[idx] = 1;
            log.push_back({"fp", rec.frame_index, rec.camera_id, *rec.gt_id,
                           rates.source_camera, rates.dest_camera, rec.reid_id});
          }
        }
      }
    }
  }
  return {std::move(trace), std::move(log)};
}

CompressionModel calibrate_compression(
    const std::vector<CompressionMeasurement>& measurements, double frame_pixels,
    double segment_count) {
  if (frame_pixels <= 0 || segment_count <= 0) {
    throw Error(ErrorKind::InvalidInput, "frame pixels and segment count must be positive");
  }
  std::set<int> distinct;
  for (const auto& m : measurements) distinct.insert(m.group_count);
  if (distinct.size() < 2) {
    throw Error(ErrorKind::Degenerate,
                "calibration needs measurements at >= 2 distinct group counts");
  }

  const int n = static_cast<int>(measurements.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = frame_pixels * segment_count;
    A(i, 1) = measurements[i].group_count * segment_count;
    y(i) = measurements[i].total_bytes;
  }
  Eigen::Vector2d sol = A.colPivHouseholderQr().solve(y);

  CompressionModel model;
  model.payload_bytes_per_pixel_per_segment = sol(0);
  model.per_group_overhead_bytes_per_segment = sol(1);
  if (model.payload_bytes_per_pixel_per_segment <= 0) {
    throw Error(ErrorKind::Degenerate, "calibration produced a non-positive payload rate");
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double pred = A(i, 0) * sol(0) + A(i, 1) * sol(1);
    if (y(i) != 0) worst = std::max(worst, std::abs(pred - y(i)) / std::abs(y(i)));
  }
  model.fit_residual = worst;
  return model;
}

double seconds_factor(double segment_len_s, double kappa) {
  return (1.0 + kappa / segment_len_s) / (1.0 + kappa);
}

double estimate_segment_size(const CompressionModel& model, const Grouping& grouping,
                             const TileGrid& grid, const NetConfig& net) {
  double factor = seconds_factor(net.segment_len_s, net.compression_kappa);
  double bytes = 0.0;
  for (const GridRect& rect : grouping.rects) {
    BBox px = rect_pixels(rect, grid);
    bytes += model.per_group_overhead_bytes_per_segment +
             model.payload_bytes_per_pixel_per_segment * px.width * px.height * factor;
  }
  return bytes;
}

ReplayReport replay_evaluate(const Trace& eval_trace,
                             const std::map<int, RoiMask>& masks,
                             const std::map<int, Grouping>& groupings,
                             const CompressionModel& model, const NetConfig& net,
                             const std::map<int, TileGrid>& grids) {
  if (net.segment_len_s <= 0 || net.bandwidth_bps <= 0 || net.rtt_s < 0 ||
      net.inference_base_hz <= 0 || net.gather_scatter_overhead <= 0) {
    throw Error(ErrorKind::InvalidInput, "invalid network config");
  }
  double fps = eval_trace.frame_rate_hz;
  if (fps <= 0) {
    throw Error(ErrorKind::InvalidInput, "trace frame rate must be positive");
  }
  double frames_per_segment = net.segment_len_s * fps;
  if (std::abs(frames_per_segment - std::round(frames_per_segment)) > 1e-6) {
    throw Error(ErrorKind::InvalidInput,
                "segment length must be a whole number of frame periods");
  }

  // every trace camera needs a grid, a mask and a grouping that partitions it
  for (const auto& cam : eval_trace.cameras) {
    if (!grids.count(cam.camera_id) || !masks.count(cam.camera_id) ||
        !groupings.count(cam.camera_id)) {
      throw Error(ErrorKind::Consistency,
                  "camera " + std::to_string(cam.camera_id) +
                      " missing from masks/groupings");
    }
    const TileGrid& grid = grids.at(cam.camera_id);
    if (grid.frame.width_px != cam.width_px || grid.frame.height_px != cam.height_px) {
      throw Error(ErrorKind::Consistency,
                  "grid does not match trace camera " + std::to_string(cam.camera_id));
    }
    const RoiMask& mask = masks.at(cam.camera_id);
    const Grouping& grouping = groupings.at(cam.camera_id);
    std::set<int> covered;
    for (const GridRect& rect : grouping.rects) {
      for (int r = rect.row0; r < rect.row0 + rect.rows; ++r) {
        for (int c = rect.col0; c < rect.col0 + rect.cols; ++c) {
          if (!covered.insert(grid.index_at(r, c)).second) {
            throw Error(ErrorKind::Consistency, "grouping rectangles overlap");
          }
        }
      }
    }
    if (covered != mask.tiles) {
      throw Error(ErrorKind::Consistency,
                  "grouping does not partition the mask of camera " +
                      std::to_string(cam.camera_id));
    }
  }

  ReplayReport report;

  // accuracy: unique (gt object, frame) pairs with at least one covered region
  std::map<int, std::map<int64_t, bool>> frame_objects;  // frame -> gt -> detected
  for (const auto& rec : eval_trace.records) {
    if (!rec.gt_id.has_value()) {
      throw Error(ErrorKind::InvalidInput, "replay requires ground-truth ids");
    }
    bool& detected = frame_objects[rec.frame_index][*rec.gt_id];
    if (detected) continue;
    const TileGrid& grid = grids.at(rec.camera_id);
    const RoiMask& mask = masks.at(rec.camera_id);
    std::vector<int> region = appearance_region(grid, rec.box);
    bool inside = true;
    for (int tile : region) {
      if (!mask.tiles.count(tile)) {
        inside = false;
        break;
      }
    }
    if (inside) detected = true;
  }
  for (const auto& [frame, objs] : frame_objects) {
    int missed_here = 0;
    for (const auto& [gt, detected] : objs) {
      (void)gt;
      report.total_object_frames++;
      if (!detected) {
        report.missed_object_frames++;
        missed_here++;
      }
    }
    if (missed_here > 0) report.per_frame_missed[frame] = missed_here;
  }
  report.accuracy =
      report.total_object_frames == 0
          ? 1.0
          : 1.0 - static_cast<double>(report.missed_object_frames) /
                      static_cast<double>(report.total_object_frames);

  // modeled bandwidth and latency
  double total_segment_bytes = 0.0;
  double frac_sum = 0.0;
  for (const auto& cam : eval_trace.cameras) {
    const TileGrid& grid = grids.at(cam.camera_id);
    double bytes = estimate_segment_size(model, groupings.at(cam.camera_id), grid, net);
    total_segment_bytes += bytes;
    report.bandwidth_bps_per_camera[cam.camera_id] = bytes * 8.0 / net.segment_len_s;
    double frac = mask_area_fraction(grid, masks.at(cam.camera_id));
    report.mask_area_fractions[cam.camera_id] = frac;
    frac_sum += frac;
  }
  report.bandwidth_bps_total = total_segment_bytes * 8.0 / net.segment_len_s;

  double mean_frac = eval_trace.cameras.empty()
                         ? 1.0
                         : frac_sum / static_cast<double>(eval_trace.cameras.size());
  double inference_hz = net.inference_base_hz / (net.gather_scatter_overhead + mean_frac);
  inference_hz = std::min(inference_hz, net.inference_base_hz / net.gather_scatter_overhead);
  report.modeled_inference_hz = inference_hz;

  report.latency_s = net.segment_len_s + total_segment_bytes * 8.0 / net.bandwidth_bps +
                     net.rtt_s + frames_per_segment / inference_hz;
  return report;
}

}  // namespace mcroi
