#include "mcroi/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcroi/error.hpp"

namespace mcroi {

using nlohmann::json;

CompressionModel default_compression_model() {
  // measured H.264 output sizes of a 1080p stream split into an increasing
  // number of independently encoded groups, 180 one-second segments
  static const std::vector<CompressionMeasurement> kCalibration = {
      {1, 82.7e6}, {4, 85.9e6}, {8, 86.2e6}, {16, 89.0e6}, {32, 90.4e6}, {64, 97.3e6}};
  return calibrate_compression(kCalibration, 1920.0 * 1080.0, 180.0);
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw Error(ErrorKind::InvalidInput, "unknown config key '" + it.key() + "' in " + where);
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

PipelineConfig pipeline_config_from_json(const std::string& json_text) {
  PipelineConfig config;
  if (json_text.empty()) return config;
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorKind::InvalidInput, "malformed pipeline config JSON");
  }
  check_keys(doc,
             {"tile_size_px", "filter", "solver", "time_budget_s", "net", "compression",
              "profile_split", "replay_window", "seed"},
             "config");
  config.tile_size_px = doc.value("tile_size_px", config.tile_size_px);
  if (doc.contains("filter")) {
    const json& f = doc.at("filter");
    check_keys(f, {"theta", "gamma", "svm_cost", "regression_degree", "ransac_iterations"},
               "config.filter");
    config.filter.theta = f.value("theta", config.filter.theta);
    config.filter.gamma = f.value("gamma", config.filter.gamma);
    config.filter.svm_cost = f.value("svm_cost", config.filter.svm_cost);
    config.filter.regression_degree =
        f.value("regression_degree", config.filter.regression_degree);
    config.filter.ransac_iterations =
        f.value("ransac_iterations", config.filter.ransac_iterations);
  }
  if (doc.contains("solver")) {
    std::string s = doc.at("solver").get<std::string>();
    if (s == "exact") {
      config.solver = PipelineConfig::Solver::Exact;
    } else if (s == "greedy") {
      config.solver = PipelineConfig::Solver::Greedy;
    } else {
      throw Error(ErrorKind::InvalidInput, "solver must be 'exact' or 'greedy'");
    }
  }
  config.time_budget_s = doc.value("time_budget_s", config.time_budget_s);
  if (doc.contains("net")) {
    const json& n = doc.at("net");
    check_keys(n,
               {"bandwidth_bps", "rtt_s", "segment_len_s", "inference_base_hz",
                "gather_scatter_overhead", "compression_kappa"},
               "config.net");
    config.net.bandwidth_bps = n.value("bandwidth_bps", config.net.bandwidth_bps);
    config.net.rtt_s = n.value("rtt_s", config.net.rtt_s);
    config.net.segment_len_s = n.value("segment_len_s", config.net.segment_len_s);
    config.net.inference_base_hz =
        n.value("inference_base_hz", config.net.inference_base_hz);
    config.net.gather_scatter_overhead =
        n.value("gather_scatter_overhead", config.net.gather_scatter_overhead);
    config.net.compression_kappa =
        n.value("compression_kappa", config.net.compression_kappa);
  }
  if (doc.contains("compression")) {
    const json& c = doc.at("compression");
    check_keys(c,
               {"per_group_overhead_bytes_per_segment", "payload_bytes_per_pixel_per_segment"},
               "config.compression");
    config.compression.per_group_overhead_bytes_per_segment =
        c.value("per_group_overhead_bytes_per_segment",
                config.compression.per_group_overhead_bytes_per_segment);
    config.compression.payload_bytes_per_pixel_per_segment =
        c.value("payload_bytes_per_pixel_per_segment",
                config.compression.payload_bytes_per_pixel_per_segment);
  }
  config.profile_split = doc.value("profile_split", config.profile_split);
  if (doc.contains("replay_window")) {
    std::string w = doc.at("replay_window").get<std::string>();
    if (w == "heldout") {
      config.replay_window = PipelineConfig::ReplayWindow::Heldout;
    } else if (w == "profile") {
      config.replay_window = PipelineConfig::ReplayWindow::Profile;
    } else if (w == "full") {
      config.replay_window = PipelineConfig::ReplayWindow::Full;
    } else {
      throw Error(ErrorKind::InvalidInput,
                  "replay_window must be 'heldout', 'profile' or 'full'");
    }
  }
  config.seed = doc.value("seed", config.seed);

  if (config.tile_size_px <= 0 || config.time_budget_s <= 0 ||
      config.profile_split <= 0.0 || config.profile_split >= 1.0) {
    throw Error(ErrorKind::InvalidInput, "pipeline config out of range");
  }
  return config;
}

std::string pipeline_config_to_json(const PipelineConfig& config) {
  json doc;
  doc["tile_size_px"] = config.tile_size_px;
  doc["filter"] = json{{"theta", config.filter.theta},
                       {"gamma", config.filter.gamma},
                       {"svm_cost", config.filter.svm_cost},
                       {"regression_degree", config.filter.regression_degree},
                       {"ransac_iterations", config.filter.ransac_iterations}};
  doc["solver"] = config.solver == PipelineConfig::Solver::Exact ? "exact" : "greedy";
  doc["time_budget_s"] = config.time_budget_s;
  doc["net"] = json{{"bandwidth_bps", config.net.bandwidth_bps},
                    {"rtt_s", config.net.rtt_s},
                    {"segment_len_s", config.net.segment_len_s},
                    {"inference_base_hz", config.net.inference_base_hz},
                    {"gather_scatter_overhead", config.net.gather_scatter_overhead},
                    {"compression_kappa", config.net.compression_kappa}};
  doc["compression"] =
      json{{"per_group_overhead_bytes_per_segment",
            config.compression.per_group_overhead_bytes_per_segment},
           {"payload_bytes_per_pixel_per_segment",
            config.compression.payload_bytes_per_pixel_per_segment}};
  doc["profile_split"] = config.profile_split;
  switch (config.replay_window) {
    case PipelineConfig::ReplayWindow::Heldout:
      doc["replay_window"] = "heldout";
      break;
    case PipelineConfig::ReplayWindow::Profile:
      doc["replay_window"] = "profile";
      break;
    case PipelineConfig::ReplayWindow::Full:
      doc["replay_window"] = "full";
      break;
  }
  doc["seed"] = config.seed;
  return doc.dump(2) + "\n";
}

namespace {

// first frame past the profile window; the window always keeps >= 1 frame
int split_frame(const Trace& trace, double profile_split) {
  if (trace.records.empty()) return trace.first_frame;
  int window = trace.last_frame - trace.first_frame + 1;
  int profile_len = static_cast<int>(std::ceil(window * profile_split));
  profile_len = std::clamp(profile_len, 1, window);
  return trace.first_frame + profile_len;
}

Trace slice_trace(const Trace& trace, int from_frame, int to_frame /*exclusive*/) {
  Trace out;
  out.frame_rate_hz = trace.frame_rate_hz;
  out.cameras = trace.cameras;
  for (const auto& rec : trace.records) {
    if (rec.frame_index >= from_frame && rec.frame_index < to_frame) {
      out.records.push_back(rec);
    }
  }
  out.normalize();
  return out;
}

}  // namespace

OfflineResult run_offline_core(const Trace& trace, const PipelineConfig& config) {
  OfflineResult result;
  result.grids = grids_for(trace, config.tile_size_px);

  int cut = split_frame(trace, config.profile_split);
  Trace profile = slice_trace(trace, trace.first_frame, cut);
  result.profile_first = trace.first_frame;
  result.profile_last = cut - 1;

  auto [filtered, report] = run_filter_pipeline(profile, config.filter);
  result.filter_report = std::move(report);

  AssociationTable table = build_lookup_table(filtered, result.grids);
  CoverInstance instance = build_cover_instance(table, result.grids);
  result.demand_count = instance.demands.size();
  result.universe_tiles = instance.universe.size();

  result.solution = config.solver == PipelineConfig::Solver::Exact
                        ? solve_exact(instance, config.time_budget_s)
                        : solve_greedy(instance);
  result.masks = result.solution.masks;

  for (const auto& [camera_id, mask] : result.masks) {
    result.groupings.emplace(camera_id, group_tiles(mask, result.grids.at(camera_id)));
  }
  return result;
}

namespace {

std::string solution_stats_json(const OfflineResult& result) {
  json per_cam = json::array();
  json fracs = json::array();
  for (const auto& [camera_id, mask] : result.masks) {
    per_cam.push_back(json::array({camera_id, static_cast<int>(mask.tiles.size())}));
    fracs.push_back(json::array(
        {camera_id, mask_area_fraction(result.grids.at(camera_id), mask)}));
  }
  const char* status = nullptr;
  switch (result.solution.status) {
    case SolveStatus::Optimal:
      status = "optimal";
      break;
    case SolveStatus::FeasibleGreedy:
      status = "feasible-greedy";
      break;
    case SolveStatus::TimeLimited:
      status = "time-limited";
      break;
  }
  json doc{{"objective", result.solution.objective},
           {"status", status},
           {"nodes_explored", result.solution.nodes_explored},
           {"demands", result.demand_count},
           {"universe_tiles", result.universe_tiles},
           {"profile_window", json::array({result.profile_first, result.profile_last})},
           {"per_camera_tiles", per_cam},
           {"mask_area_fractions", fracs}};
  return doc.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  out << content;
}

}  // namespace

std::string run_offline(const std::string& trace_path, const PipelineConfig& config,
                        const std::string& masks_path, const std::string& groups_path,
                        const std::string& filter_report_path,
                        const std::string& solution_path) {
  Trace trace = load_trace(trace_path);
  OfflineResult result = run_offline_core(trace, config);
  save_masks(result.grids, result.masks, masks_path);
  save_groups(result.groupings, result.grids, groups_path);
  save_filter_report(result.filter_report, filter_report_path);
  std::string stats = solution_stats_json(result);
  write_text(solution_path, stats);
  return stats;
}

Trace select_replay_window(const Trace& trace, const PipelineConfig& config) {
  int cut = split_frame(trace, config.profile_split);
  Trace window;
  switch (config.replay_window) {
    case PipelineConfig::ReplayWindow::Heldout:
      window = slice_trace(trace, cut, trace.last_frame + 1);
      break;
    case PipelineConfig::ReplayWindow::Profile:
      window = slice_trace(trace, trace.first_frame, cut);
      break;
    case PipelineConfig::ReplayWindow::Full:
      window = trace;
      break;
  }
  if (window.records.empty()) {
    throw Error(ErrorKind::InvalidInput, "selected replay window has no records");
  }
  return window;
}

ReplayReport run_online_core(const Trace& trace, const PipelineConfig& config,
                             const MaskFile& mask_file,
                             const std::map<int, Grouping>& groupings) {
  // the mask file's grids are authoritative for replay; the trace must agree
  for (const auto& cam : trace.cameras) {
    auto it = mask_file.grids.find(cam.camera_id);
    if (it == mask_file.grids.end()) {
      throw Error(ErrorKind::Consistency,
                  "masks missing camera " + std::to_string(cam.camera_id));
    }
    if (it->second.frame.width_px != cam.width_px ||
        it->second.frame.height_px != cam.height_px) {
      throw Error(ErrorKind::Consistency,
                  "mask grid does not match trace camera " +
                      std::to_string(cam.camera_id));
    }
  }
  Trace window = select_replay_window(trace, config);
  return replay_evaluate(window, mask_file.masks, groupings, config.compression,
                         config.net, mask_file.grids);
}

std::string run_online(const std::string& trace_path, const std::string& masks_path,
                       const std::string& groups_path, const PipelineConfig& config,
                       const std::string& report_path) {
  Trace trace = load_trace(trace_path);
  MaskFile mask_file = load_masks(masks_path);
  std::map<int, Grouping> groupings = load_groups(groups_path);
  ReplayReport report = run_online_core(trace, config, mask_file, groupings);
  save_replay_report(report, report_path);
  json summary{{"accuracy", report.accuracy},
               {"bandwidth_mbps", report.bandwidth_bps_total / 1e6},
               {"latency_s", report.latency_s}};
  return summary.dump();
}

int run_synth(const std::string& scene_config_path, const std::string& out_trace_path,
              const std::string& out_error_log_path) {
  SceneConfig scene = load_scene_config(scene_config_path);
  auto [trace, log] = generate_scene(scene);
  save_trace(trace, out_trace_path);
  save_error_log(log, out_error_log_path);

  std::vector<char> seen(static_cast<size_t>(scene.object_count) + 1, 0);
  for (const auto& rec : trace.records) {
    if (rec.gt_id && *rec.gt_id >= 1 && *rec.gt_id <= scene.object_count) {
      seen[static_cast<size_t>(*rec.gt_id)] = 1;
    }
  }
  int unseen = 0;
  for (int i = 1; i <= scene.object_count; ++i) {
    if (!seen[static_cast<size_t>(i)]) unseen++;
  }
  return unseen;
}

std::vector<SweepPoint> run_sweep_core(const Trace& trace, const PipelineConfig& config,
                                       const std::string& param,
                                       const std::vector<double>& values) {
  if (values.empty()) {
    throw Error(ErrorKind::InvalidInput, "sweep needs at least one value");
  }
  std::vector<SweepPoint> points;

  auto evaluate = [&](const PipelineConfig& cfg, const OfflineResult& offline) {
    Trace window = select_replay_window(trace, cfg);
    ReplayReport report = replay_evaluate(window, offline.masks, offline.groupings,
                                          cfg.compression, cfg.net, offline.grids);
    SweepPoint point;
    point.total_tiles = offline.solution.objective;
    point.accuracy = report.accuracy;
    point.bandwidth_bps = report.bandwidth_bps_total;
    point.latency_s = report.latency_s;
    return point;
  };

  if (param == "gamma" || param == "theta") {
    for (double v : values) {
      PipelineConfig cfg = config;
      if (param == "gamma") {
        cfg.filter.gamma = v;
      } else {
        cfg.filter.theta = v;
      }
      OfflineResult offline = run_offline_core(trace, cfg);
      SweepPoint point = evaluate(cfg, offline);
      point.value = v;
      points.push_back(point);
    }
  } else if (param == "segment-len") {
    OfflineResult offline = run_offline_core(trace, config);
    for (double v : values) {
      PipelineConfig cfg = config;
      cfg.net.segment_len_s = v;
      SweepPoint point = evaluate(cfg, offline);
      point.value = v;
      points.push_back(point);
    }
  } else {
    throw Error(ErrorKind::InvalidInput,
                "sweep param must be 'gamma', 'theta' or 'segment-len'");
  }
  return points;
}

void run_sweep(const std::string& trace_path, const PipelineConfig& config,
               const std::string& param, const std::vector<double>& values,
               const std::string& out_csv_path) {
  Trace trace = load_trace(trace_path);
  std::vector<SweepPoint> points = run_sweep_core(trace, config, param, values);
  std::ostringstream csv;
  csv << "param,value,total_tiles,accuracy,bandwidth_bps,latency_s\n";
  for (const SweepPoint& p : points) {
    csv << param << ',' << format_double(p.value) << ',' << p.total_tiles << ','
        << format_double(p.accuracy) << ',' << format_double(p.bandwidth_bps) << ','
        << format_double(p.latency_s) << '\n';
  }
  write_text(out_csv_path, csv.str());
}

}  // namespace mcroi
