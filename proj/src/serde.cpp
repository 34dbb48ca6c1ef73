#include "mcroi/serde.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "mcroi/error.hpp"

namespace mcroi {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorKind::InvalidInput, "malformed JSON in " + what);
  }
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  out << content;
  if (!out) {
    throw Error(ErrorKind::Io, "write failed for " + path);
  }
}

FrameSpec frame_from_json(const json& j) {
  FrameSpec f;
  f.camera_id = j.at("camera_id").get<int>();
  f.width_px = j.at("width_px").get<int>();
  f.height_px = j.at("height_px").get<int>();
  f.tile_size_px = j.at("tile_size_px").get<int>();
  return f;
}

json frame_to_json(const FrameSpec& f) {
  return json{{"camera_id", f.camera_id},
              {"width_px", f.width_px},
              {"height_px", f.height_px},
              {"tile_size_px", f.tile_size_px}};
}

}  // namespace

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path);
  }
  Trace trace;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorKind::InvalidInput,
                  path + ": line " + std::to_string(line_no) + ": malformed JSON");
    }
    try {
      if (!have_header) {
        trace.frame_rate_hz = j.at("frame_rate").get<double>();
        for (const json& cam : j.at("cameras")) {
          trace.cameras.push_back(frame_from_json(cam));
        }
        have_header = true;
        continue;
      }
      DetectionRecord rec;
      rec.camera_id = j.at("camera").get<int>();
      rec.frame_index = j.at("frame").get<int>();
      const json& bbox = j.at("bbox");
      if (!bbox.is_array() || bbox.size() != 4) {
        throw Error(ErrorKind::InvalidInput, "bbox must be [left, top, width, height]");
      }
      rec.box = BBox{bbox[0].get<double>(), bbox[1].get<double>(),
                     bbox[2].get<double>(), bbox[3].get<double>()};
      rec.reid_id = j.at("reid").get<int64_t>();
      if (j.contains("gt") && !j.at("gt").is_null()) {
        rec.gt_id = j.at("gt").get<int64_t>();
      }
      if (rec.frame_index < 0 || rec.reid_id < 0) {
        throw Error(ErrorKind::InvalidInput, "frame and reid must be non-negative");
      }
      if (!trace.find_camera(rec.camera_id)) {
        throw Error(ErrorKind::InvalidInput,
                    "record references camera " + std::to_string(rec.camera_id) +
                        " absent from the header");
      }
      trace.records.push_back(rec);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidInput,
                  path + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(),
                  path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) {
    throw Error(ErrorKind::InvalidInput, path + ": missing header line");
  }
  trace.normalize();
  return trace;
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ostringstream out;
  json header;
  header["frame_rate"] = trace.frame_rate_hz;
  json cams = json::array();
  for (const auto& cam : trace.cameras) cams.push_back(frame_to_json(cam));
  header["cameras"] = cams;
  out << header.dump() << '\n';
  for (const auto& rec : trace.records) {
    json j;
    j["camera"] = rec.camera_id;
    j["frame"] = rec.frame_index;
    j["bbox"] = {rec.box.left, rec.box.top, rec.box.width, rec.box.height};
    j["reid"] = rec.reid_id;
    j["gt"] = rec.gt_id.has_value() ? json(*rec.gt_id) : json(nullptr);
    out << j.dump() << '\n';
  }
  write_file(path, out.str());
}

MaskFile load_masks(const std::string& path) {
  json doc = parse_json(read_file(path), path);
  MaskFile file;
  try {
    for (const json& cam : doc.at("cameras")) {
      FrameSpec spec = frame_from_json(cam);
      TileGrid grid = build_grid(spec);
      if (grid.cols != cam.at("cols").get<int>() ||
          grid.rows != cam.at("rows").get<int>()) {
        throw Error(ErrorKind::Consistency,
                    "mask grid dimensions are inconsistent for camera " +
                        std::to_string(spec.camera_id));
      }
      RoiMask mask;
      mask.camera_id = spec.camera_id;
      for (const json& t : cam.at("tiles")) {
        int tile = t.get<int>();
        if (!grid.valid_index(tile)) {
          throw Error(ErrorKind::Consistency,
                      "mask tile out of range for camera " + std::to_string(spec.camera_id));
        }
        mask.tiles.insert(tile);
      }
      file.grids.emplace(spec.camera_id, grid);
      file.masks.emplace(spec.camera_id, std::move(mask));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
  }
  return file;
}

void save_masks(const std::map<int, TileGrid>& grids,
                const std::map<int, RoiMask>& masks, const std::string& path) {
  json cams = json::array();
  for (const auto& [camera_id, grid] : grids) {
    json cam = frame_to_json(grid.frame);
    cam["cols"] = grid.cols;
    cam["rows"] = grid.rows;
    json tiles = json::array();
    auto it = masks.find(camera_id);
    if (it != masks.end()) {
      for (int t : it->second.tiles) tiles.push_back(t);  // std::set: ascending
    }
    cam["tiles"] = tiles;
    cams.push_back(cam);
  }
  write_file(path, json{{"cameras", cams}}.dump(2) + "\n");
}

std::map<int, Grouping> load_groups(const std::string& path) {
  json doc = parse_json(read_file(path), path);
  std::map<int, Grouping> out;
  try {
    for (const json& cam : doc.at("cameras")) {
      Grouping g;
      g.camera_id = cam.at("camera_id").get<int>();
      for (const json& r : cam.at("rects")) {
        GridRect rect;
        rect.camera_id = g.camera_id;
        rect.col0 = r.at("col0").get<int>();
        rect.row0 = r.at("row0").get<int>();
        rect.cols = r.at("cols").get<int>();
        rect.rows = r.at("rows").get<int>();
        if (rect.cols < 1 || rect.rows < 1 || rect.col0 < 0 || rect.row0 < 0) {
          throw Error(ErrorKind::InvalidInput, "invalid group rectangle");
        }
        g.rects.push_back(rect);
      }
      out.emplace(g.camera_id, std::move(g));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
  }
  return out;
}

void save_groups(const std::map<int, Grouping>& groupings,
                 const std::map<int, TileGrid>& grids, const std::string& path) {
  json cams = json::array();
  for (const auto& [camera_id, grouping] : groupings) {
    json rects = json::array();
    auto grid_it = grids.find(camera_id);
    for (const GridRect& rect : grouping.rects) {
      json r{{"col0", rect.col0},
             {"row0", rect.row0},
             {"cols", rect.cols},
             {"rows", rect.rows}};
      if (grid_it != grids.end()) {
        BBox px = rect_pixels(rect, grid_it->second);
        r["px"] = {static_cast<int>(px.left), static_cast<int>(px.top),
                   static_cast<int>(px.width), static_cast<int>(px.height)};
      }
      rects.push_back(r);
    }
    cams.push_back(json{{"camera_id", camera_id}, {"rects", rects}});
  }
  write_file(path, json{{"cameras", cams}}.dump(2) + "\n");
}

std::string filter_report_to_json(const FilterReport& report) {
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back(json{{"source", p.source_camera},
                         {"dest", p.dest_camera},
                         {"positives", p.positives},
                         {"outliers_rectified", p.outliers_rectified},
                         {"negatives_removed", p.negatives_removed},
                         {"ransac_inlier_ratio", p.ransac_inlier_ratio},
                         {"regression_skipped", p.regression_skipped},
                         {"svm_skipped", p.svm_skipped}});
  }
  json doc{{"pairs", pairs},
           {"totals",
            json{{"records_rectified", report.records_rectified},
                 {"records_removed", report.records_removed}}}};
  return doc.dump(2) + "\n";
}

void save_filter_report(const FilterReport& report, const std::string& path) {
  write_file(path, filter_report_to_json(report));
}

CoverInstance load_instance(const std::string& path) {
  json doc = parse_json(read_file(path), path);
  CoverInstance instance;
  try {
    for (const json& t : doc.at("universe")) {
      instance.universe.push_back(TileRef{t.at(0).get<int>(), t.at(1).get<int>()});
    }
    for (const json& d : doc.at("demands")) {
      ObjectDemand demand;
      demand.frame_index = d.at("frame").get<int>();
      demand.object_id = d.at("object").get<int64_t>();
      demand.dup_index = d.value("dup", 0);
      for (const json& alt : d.at("alternatives")) {
        std::vector<TileRef> tiles;
        for (const json& t : alt) {
          tiles.push_back(TileRef{t.at(0).get<int>(), t.at(1).get<int>()});
        }
        demand.alternatives.push_back(std::move(tiles));
      }
      instance.demands.push_back(std::move(demand));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
  }
  return instance;
}

void save_instance(const CoverInstance& instance, const std::string& path) {
  json universe = json::array();
  for (const TileRef& t : instance.universe) {
    universe.push_back(json::array({t.camera_id, t.tile_index}));
  }
  json demands = json::array();
  for (const ObjectDemand& d : instance.demands) {
    json alts = json::array();
    for (const auto& alt : d.alternatives) {
      json tiles = json::array();
      for (const TileRef& t : alt) {
        tiles.push_back(json::array({t.camera_id, t.tile_index}));
      }
      alts.push_back(tiles);
    }
    json jd{{"frame", d.frame_index}, {"object", d.object_id}, {"alternatives", alts}};
    if (d.dup_index != 0) jd["dup"] = d.dup_index;
    demands.push_back(jd);
  }
  write_file(path, json{{"universe", universe}, {"demands", demands}}.dump() + "\n");
}

SceneConfig load_scene_config(const std::string& path) {
  json doc = parse_json(read_file(path), path);
  SceneConfig config;
  try {
    config.seed = doc.value("seed", 0ULL);
    config.object_count = doc.at("object_count").get<int>();
    config.duration_frames = doc.at("duration_frames").get<int>();
    config.frame_rate_hz = doc.at("frame_rate_hz").get<double>();
    const json& fp = doc.at("footprint");
    config.footprint_width = fp.at(0).get<double>();
    config.footprint_height = fp.at(1).get<double>();
    config.speed_jitter = doc.value("speed_jitter", 0.0);
    config.footprint_jitter = doc.value("footprint_jitter", 0.0);
    config.spawn_window_s = doc.value("spawn_window_s", 0.0);
    for (const json& cam : doc.at("cameras")) {
      CameraSetup setup;
      setup.frame = frame_from_json(cam);
      const json& h = cam.at("homography");
      if (!h.is_array() || h.size() != 9) {
        throw Error(ErrorKind::InvalidInput, "homography must have 9 entries");
      }
      for (int i = 0; i < 9; ++i) setup.ground_to_pixel.m[i] = h[i].get<double>();
      for (const json& p : cam.at("visible_polygon")) {
        setup.visible_polygon.push_back(Vec2{p.at(0).get<double>(), p.at(1).get<double>()});
      }
      config.cameras.push_back(std::move(setup));
    }
    for (const json& p : doc.at("paths")) {
      MotionPath path;
      path.speed = p.at("speed").get<double>();
      path.footprint_scale = p.value("footprint_scale", 1.0);
      for (const json& w : p.at("waypoints")) {
        path.waypoints.push_back(Vec2{w.at(0).get<double>(), w.at(1).get<double>()});
      }
      config.paths.push_back(std::move(path));
    }
    if (doc.contains("error_rates")) {
      for (const json& r : doc.at("error_rates")) {
        PairErrorRates rates;
        rates.source_camera = r.at("source").get<int>();
        rates.dest_camera = r.at("dest").get<int>();
        rates.fp_rate = r.value("fp_rate", 0.0);
        rates.fn_rate = r.value("fn_rate", 0.0);
        config.error_rates.push_back(rates);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
  }
  return config;
}

void save_scene_config(const SceneConfig& config, const std::string& path) {
  json doc;
  doc["seed"] = config.seed;
  doc["object_count"] = config.object_count;
  doc["duration_frames"] = config.duration_frames;
  doc["frame_rate_hz"] = config.frame_rate_hz;
  doc["footprint"] = {config.footprint_width, config.footprint_height};
  doc["speed_jitter"] = config.speed_jitter;
  doc["footprint_jitter"] = config.footprint_jitter;
  doc["spawn_window_s"] = config.spawn_window_s;
  json cams = json::array();
  for (const auto& cam : config.cameras) {
    json c = frame_to_json(cam.frame);
    c["homography"] = cam.ground_to_pixel.m;
    json poly = json::array();
    for (const Vec2& p : cam.visible_polygon) poly.push_back(json::array({p.x, p.y}));
    c["visible_polygon"] = poly;
    cams.push_back(c);
  }
  doc["cameras"] = cams;
  json paths = json::array();
  for (const auto& path : config.paths) {
    json wps = json::array();
    for (const Vec2& w : path.waypoints) wps.push_back(json::array({w.x, w.y}));
    paths.push_back(json{{"speed", path.speed},
                         {"footprint_scale", path.footprint_scale},
                         {"waypoints", wps}});
  }
  doc["paths"] = paths;
  json rates = json::array();
  for (const auto& r : config.error_rates) {
    rates.push_back(json{{"source", r.source_camera},
                         {"dest", r.dest_camera},
                         {"fp_rate", r.fp_rate},
                         {"fn_rate", r.fn_rate}});
  }
  doc["error_rates"] = rates;
  write_file(path, doc.dump(2) + "\n");
}

void save_error_log(const ErrorLog& log, const std::string& path) {
  std::ostringstream out;
  for (const auto& e : log) {
    json j{{"kind", e.kind},
           {"frame", e.frame},
           {"camera", e.camera},
           {"object", e.object},
           {"pair", json::array({e.pair_source, e.pair_dest})},
           {"new_reid", e.new_reid}};
    out << j.dump() << '\n';
  }
  write_file(path, out.str());
}

ErrorLog load_error_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path);
  }
  ErrorLog log;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorKind::InvalidInput,
                  path + ": line " + std::to_string(line_no) + ": malformed JSON");
    }
    InjectedError e;
    e.kind = j.at("kind").get<std::string>();
    e.frame = j.at("frame").get<int>();
    e.camera = j.at("camera").get<int>();
    e.object = j.at("object").get<int64_t>();
    e.pair_source = j.at("pair").at(0).get<int>();
    e.pair_dest = j.at("pair").at(1).get<int>();
    e.new_reid = j.at("new_reid").get<int64_t>();
    log.push_back(std::move(e));
  }
  return log;
}

std::string replay_report_to_json(const ReplayReport& report) {
  json per_frame = json::array();
  for (const auto& [frame, missed] : report.per_frame_missed) {
    per_frame.push_back(json::array({frame, missed}));
  }
  json per_cam_bw = json::array();
  for (const auto& [cam, bps] : report.bandwidth_bps_per_camera) {
    per_cam_bw.push_back(json::array({cam, bps}));
  }
  json fracs = json::array();
  for (const auto& [cam, f] : report.mask_area_fractions) {
    fracs.push_back(json::array({cam, f}));
  }
  json doc{{"accuracy", report.accuracy},
           {"total_object_frames", report.total_object_frames},
           {"missed_object_frames", report.missed_object_frames},
           {"per_frame_missed", per_frame},
           {"bandwidth_bps_per_camera", per_cam_bw},
           {"bandwidth_bps_total", report.bandwidth_bps_total},
           {"latency_s", report.latency_s},
           {"mask_area_fractions", fracs},
           {"modeled_inference_hz", report.modeled_inference_hz}};
  return doc.dump(2) + "\n";
}

void save_replay_report(const ReplayReport& report, const std::string& path) {
  write_file(path, replay_report_to_json(report));
}

}  // namespace mcroi
