#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mcroi/geometry.hpp"
#include "mcroi/grouping.hpp"
#include "mcroi/trace.hpp"

namespace mcroi {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// 3x3 projective map from ground-plane coordinates to pixel coordinates,
// row-major.
struct Homography {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double det() const;
  Homography inverse() const;  // throws on |det| <= 1e-9
};

Vec2 project_ground_to_camera(const Homography& h, const Vec2& point);

struct CameraSetup {
  FrameSpec frame;
  Homography ground_to_pixel;
  std::vector<Vec2> visible_polygon;  // ground region this camera watches
};

struct MotionPath {
  std::vector<Vec2> waypoints;
  double speed = 1.0;           // ground units per second
  double footprint_scale = 1.0;  // per-path multiplier on the object footprint
};

struct PairErrorRates {
  int source_camera = 0;
  int dest_camera = 0;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
};

struct SceneConfig {
  std::vector<CameraSetup> cameras;
  int object_count = 0;
  std::vector<MotionPath> paths;  // objects are assigned round-robin
  double footprint_width = 1.0;   // ground-plane extent of an object
  double footprint_height = 1.0;
  double speed_jitter = 0.0;      // relative, per object
  double footprint_jitter = 0.0;  // relative, per object
  double spawn_window_s = 0.0;    // entry times spread over [0, window)
  int duration_frames = 0;
  double frame_rate_hz = 10.0;
  std::vector<PairErrorRates> error_rates;
  uint64_t seed = 0;
};

struct InjectedError {
  std::string kind;  // "fn" or "fp"
  int frame = 0;
  int camera = 0;
  int64_t object = 0;  // ground-truth id of the affected record
  int pair_source = 0;
  int pair_dest = 0;
  int64_t new_reid = 0;
};

using ErrorLog = std::vector<InjectedError>;

// Deterministic synthetic trace: objects move along ground-plane paths,
// project into every camera whose visible polygon contains them, and start
// with reid_id == gt_id. Per-pair error injection then splits overlap
// records to fresh ids (FN) or borrows another object's id (FP).
std::pair<Trace, ErrorLog> generate_scene(const SceneConfig& config);

// bytes = payload_per_pixel * pixels * segments + overhead_per_group * groups * segments
struct CompressionModel {
  double per_group_overhead_bytes_per_segment = 0.0;  // F
  double payload_bytes_per_pixel_per_segment = 0.0;   // c
  double fit_residual = 0.0;  // max relative error over the calibration set
};

struct CompressionMeasurement {
  int group_count = 0;
  double total_bytes = 0.0;
};

// Least-squares fit of the two-parameter model against measured sizes taken
// at a common frame size and duration.
CompressionModel calibrate_compression(
    const std::vector<CompressionMeasurement>& measurements, double frame_pixels,
    double segment_count);

struct NetConfig {
  double bandwidth_bps = 30e6;
  double rtt_s = 0.010;
  double segment_len_s = 1.0;
  double inference_base_hz = 52.0;
  double gather_scatter_overhead = 0.1;
  double compression_kappa = 0.5;  // knee of the segment-length factor
};

// decreasing in segment length, 1 at segment_len = 1 s
double seconds_factor(double segment_len_s, double kappa);

// modeled bytes of one segment of one camera stream
double estimate_segment_size(const CompressionModel& model, const Grouping& grouping,
                             const TileGrid& grid, const NetConfig& net);

struct ReplayReport {
  double accuracy = 1.0;
  int64_t total_object_frames = 0;
  int64_t missed_object_frames = 0;
  std::map<int, int> per_frame_missed;  // frames with at least one miss
  std::map<int, double> bandwidth_bps_per_camera;
  double bandwidth_bps_total = 0.0;
  double latency_s = 0.0;
  std::map<int, double> mask_area_fractions;
  double modeled_inference_hz = 0.0;
};

// Replay a labeled trace through masks/groupings: a unique object counts
// detected at a frame iff at least one of its appearance regions is fully
// inside the masks. Bandwidth and latency come from the compression and
// network models.
ReplayReport replay_evaluate(const Trace& eval_trace,
                             const std::map<int, RoiMask>& masks,
                             const std::map<int, Grouping>& groupings,
                             const CompressionModel& model, const NetConfig& net,
                             const std::map<int, TileGrid>& grids);

}  // namespace mcroi
