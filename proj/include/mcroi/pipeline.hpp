#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcroi/cover.hpp"
#include "mcroi/filters.hpp"
#include "mcroi/serde.hpp"
#include "mcroi/sim.hpp"

namespace mcroi {

// two-parameter compression model fit from the bundled 1080p tile-split
// calibration set (180 one-second segments)
CompressionModel default_compression_model();

struct PipelineConfig {
  int tile_size_px = 64;
  FilterConfig filter;

  enum class Solver { Exact, Greedy };
  Solver solver = Solver::Exact;
  double time_budget_s = 60.0;

  NetConfig net;
  CompressionModel compression = default_compression_model();

  double profile_split = 1.0 / 3.0;  // leading fraction of the window profiled

  enum class ReplayWindow { Heldout, Profile, Full };
  ReplayWindow replay_window = ReplayWindow::Heldout;

  uint64_t seed = 0;
};

// "" or "{}" yields the defaults; unknown keys are rejected
PipelineConfig pipeline_config_from_json(const std::string& json_text);
std::string pipeline_config_to_json(const PipelineConfig& config);

struct OfflineResult {
  std::map<int, TileGrid> grids;
  std::map<int, RoiMask> masks;
  std::map<int, Grouping> groupings;
  FilterReport filter_report;
  Solution solution;
  size_t demand_count = 0;
  size_t universe_tiles = 0;
  int profile_first = 0;
  int profile_last = -1;  // inclusive
};

// filter pipeline -> lookup table -> cover instance -> solve -> group,
// over the leading profile window of the trace
OfflineResult run_offline_core(const Trace& trace, const PipelineConfig& config);

// writes masks, groups, filter report and solution stats; returns the
// solution stats JSON
std::string run_offline(const std::string& trace_path, const PipelineConfig& config,
                        const std::string& masks_path, const std::string& groups_path,
                        const std::string& filter_report_path,
                        const std::string& solution_path);

// replay window of the trace selected by config.replay_window
Trace select_replay_window(const Trace& trace, const PipelineConfig& config);

ReplayReport run_online_core(const Trace& trace, const PipelineConfig& config,
                             const MaskFile& mask_file,
                             const std::map<int, Grouping>& groupings);

// writes the replay report; returns a one-line summary JSON
std::string run_online(const std::string& trace_path, const std::string& masks_path,
                       const std::string& groups_path, const PipelineConfig& config,
                       const std::string& report_path);

// returns the number of configured objects that never produced a record
int run_synth(const std::string& scene_config_path, const std::string& out_trace_path,
              const std::string& out_error_log_path);

struct SweepPoint {
  double value = 0.0;
  int total_tiles = 0;
  double accuracy = 0.0;
  double bandwidth_bps = 0.0;
  double latency_s = 0.0;
};

// param is one of "gamma", "theta", "segment-len"
std::vector<SweepPoint> run_sweep_core(const Trace& trace, const PipelineConfig& config,
                                       const std::string& param,
                                       const std::vector<double>& values);

void run_sweep(const std::string& trace_path, const PipelineConfig& config,
               const std::string& param, const std::vector<double>& values,
               const std::string& out_csv_path);

}  // namespace mcroi
