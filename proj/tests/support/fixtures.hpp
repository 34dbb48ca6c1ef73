// Shared test fixtures: the worked two-camera frame and small scene builders.
#pragma once

#include <cstdio>
#include <filesystem>
#include <set>
#include <string>

#include "mcroi/sim.hpp"
#include "mcroi/trace.hpp"

namespace fixtures {

// Two 384x256 cameras on a 64 px grid (6 cols x 4 rows, tiles 1..24).
// Seven objects; object 1 is visible in both cameras. Appearance regions:
//   obj 1: {9,10,15,16}@C1 and {7,8,13,14}@C2
//   obj 2: {3,4,9,10}@C1      obj 5: {2,8}@C2
//   obj 3: {4,5,10,11}@C1     obj 6: {3}@C2
//   obj 4: {11}@C1            obj 7: {3,9}@C2
// The minimal cover is 12 tiles: C1{3,4,5,9,10,11,15,16} + C2{2,3,8,9}.
inline mcroi::Trace two_camera_frame(bool with_gt = true) {
  mcroi::Trace trace;
  trace.frame_rate_hz = 10.0;
  trace.cameras = {
      mcroi::FrameSpec{1, 384, 256, 64},
      mcroi::FrameSpec{2, 384, 256, 64},
  };
  auto add = [&](int cam, int64_t id, double left, double top, double w, double h) {
    mcroi::DetectionRecord rec;
    rec.camera_id = cam;
    rec.frame_index = 0;
    rec.box = mcroi::BBox{left, top, w, h};
    rec.reid_id = id;
    if (with_gt) rec.gt_id = id;
    trace.records.push_back(rec);
  };
  // columns are 64 px wide; a box spanning [140, 240) covers columns 2-3
  add(1, 1, 140.0, 80.0, 100.0, 100.0);   // {9,10,15,16}
  add(1, 2, 140.0, 16.0, 100.0, 100.0);   // {3,4,9,10}
  add(1, 3, 204.0, 16.0, 100.0, 100.0);   // {4,5,10,11}
  add(1, 4, 270.0, 70.0, 50.0, 50.0);     // {11}
  add(2, 1, 10.0, 80.0, 100.0, 100.0);    // {7,8,13,14}
  add(2, 5, 70.0, 30.0, 50.0, 80.0);      // {2,8}
  add(2, 6, 140.0, 16.0, 40.0, 40.0);     // {3}
  add(2, 7, 150.0, 30.0, 40.0, 80.0);     // {3,9}
  trace.normalize();
  return trace;
}

inline std::set<int> expected_mask_c1() { return {3, 4, 5, 9, 10, 11, 15, 16}; }
inline std::set<int> expected_mask_c2() { return {2, 3, 8, 9}; }

// affine ground->pixel map fitting the ground rectangle [gx0,gx1]x[gy0,gy1]
// onto the full frame
inline mcroi::Homography fit_rect_to_frame(double gx0, double gy0, double gx1,
                                           double gy1, const mcroi::FrameSpec& frame) {
  mcroi::Homography h;
  double sx = frame.width_px / (gx1 - gx0);
  double sy = frame.height_px / (gy1 - gy0);
  h.m = {sx, 0, -gx0 * sx, 0, sy, -gy0 * sy, 0, 0, 1};
  return h;
}

// Two overlapping cameras watching adjacent ground rectangles; lanes run
// through both. Good default for end-to-end filter/cover tests.
inline mcroi::SceneConfig two_camera_scene(uint64_t seed, int objects = 12,
                                           int frames = 60) {
  mcroi::SceneConfig scene;
  scene.seed = seed;
  scene.object_count = objects;
  scene.duration_frames = frames;
  scene.frame_rate_hz = 10.0;
  scene.footprint_width = 3.0;
  scene.footprint_height = 2.0;
  scene.speed_jitter = 0.15;
  scene.footprint_jitter = 0.3;
  scene.spawn_window_s = frames / 10.0 * 0.6;

  mcroi::CameraSetup c1;
  c1.frame = mcroi::FrameSpec{1, 640, 384, 64};
  c1.ground_to_pixel = fit_rect_to_frame(-30.0, -12.0, 10.0, 12.0, c1.frame);
  c1.visible_polygon = {{-30, -12}, {10, -12}, {10, 12}, {-30, 12}};
  mcroi::CameraSetup c2;
  c2.frame = mcroi::FrameSpec{2, 640, 384, 64};
  c2.ground_to_pixel = fit_rect_to_frame(-10.0, -12.0, 30.0, 12.0, c2.frame);
  c2.visible_polygon = {{-10, -12}, {30, -12}, {30, 12}, {-10, 12}};
  scene.cameras = {c1, c2};

  scene.paths = {
      mcroi::MotionPath{{{-28, -6}, {28, -6}}, 8.0},
      mcroi::MotionPath{{{28, 2}, {-28, 2}}, 8.0},
      mcroi::MotionPath{{{-28, 8}, {28, 8}}, 6.0},
  };
  return scene;
}

// Five affine cameras around an intersection: four arm cameras reaching
// `band` units past the centre line plus a centre overview camera. Six lanes
// cross the middle. Wide enough overlap bands for well-posed pair regression.
inline mcroi::SceneConfig five_camera_scene(uint64_t seed, double band = 6.0,
                                            int objects = 80, int frames = 120) {
  mcroi::SceneConfig scene;
  scene.seed = seed;
  scene.object_count = objects;
  scene.duration_frames = frames;
  scene.frame_rate_hz = 10.0;
  scene.footprint_width = 4.2;
  scene.footprint_height = 2.0;
  scene.speed_jitter = 0.1;
  scene.footprint_jitter = 0.15;
  scene.spawn_window_s = frames / 10.0;

  const double reach = 36.0, half = 12.0;
  auto arm = [&](int id, double x0, double y0, double x1, double y1) {
    mcroi::CameraSetup cam;
    cam.frame = mcroi::FrameSpec{id, 1280, 768, 64};
    cam.ground_to_pixel = fit_rect_to_frame(x0, y0, x1, y1, cam.frame);
    cam.visible_polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    return cam;
  };
  scene.cameras = {
      arm(1, -reach, -half, band, half),   // west arm
      arm(2, -band, -half, reach, half),   // east arm
      arm(3, -half, -reach, half, band),   // south arm
      arm(4, -half, -band, half, reach),   // north arm
  };
  mcroi::CameraSetup centre;
  centre.frame = mcroi::FrameSpec{5, 1280, 960, 64};
  centre.ground_to_pixel = fit_rect_to_frame(-half, -half, half, half, centre.frame);
  centre.visible_polygon = {{-half, -half}, {half, -half}, {half, half}, {-half, half}};
  scene.cameras.push_back(centre);

  scene.paths = {
      mcroi::MotionPath{{{-34, -3}, {34, -3}}, 8.0, 1.0},
      mcroi::MotionPath{{{34, 3}, {-34, 3}}, 7.0, 0.9},
      mcroi::MotionPath{{{-3, 34}, {-3, -34}}, 8.5, 1.15},
      mcroi::MotionPath{{{3, -34}, {3, 34}}, 7.5, 0.95},
      mcroi::MotionPath{{{-34, -7}, {-6, -7}, {6, 7}, {34, 7}}, 6.5, 1.3},
      mcroi::MotionPath{{{7, 34}, {7, 6}, {-7, -6}, {-7, -34}}, 7.0, 1.05},
  };
  return scene;
}

inline std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace fixtures
