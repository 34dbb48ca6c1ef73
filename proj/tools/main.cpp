// command-line front end; talks to the core exclusively through the C API
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mcroi.h"

namespace {

using nlohmann::json;

struct ConfigFlags {
  std::string config_path;
  int tile_size = 0;
  double gamma = 0, theta = 0, svm_cost = 0;
  int degree = 0, ransac_iters = 0;
  std::string solver;
  double time_budget = 0;
  double segment_len = 0, bandwidth = 0, rtt = 0;
  double profile_split = 0;
  std::string replay_window;
  uint64_t seed = 0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path, "pipeline config JSON file");
  cmd->add_option("--tile-size", flags.tile_size, "tile edge in pixels");
  cmd->add_option("--gamma", flags.gamma, "SVM kernel width");
  cmd->add_option("--theta", flags.theta, "RANSAC threshold multiplier");
  cmd->add_option("--svm-cost", flags.svm_cost, "SVM soft-margin penalty");
  cmd->add_option("--degree", flags.degree, "regression polynomial degree");
  cmd->add_option("--ransac-iters", flags.ransac_iters, "RANSAC iterations");
  cmd->add_option("--solver", flags.solver, "exact|greedy")
      ->check(CLI::IsMember({"exact", "greedy"}));
  cmd->add_option("--time-budget", flags.time_budget, "exact solver budget, seconds");
  cmd->add_option("--segment-len", flags.segment_len, "streaming segment length, seconds");
  cmd->add_option("--bandwidth", flags.bandwidth, "link bandwidth, bits/s");
  cmd->add_option("--rtt", flags.rtt, "round-trip time, seconds");
  cmd->add_option("--profile-split", flags.profile_split,
                  "leading fraction of the window used for profiling");
  cmd->add_option("--replay-window", flags.replay_window, "heldout|profile|full")
      ->check(CLI::IsMember({"heldout", "profile", "full"}));
  cmd->add_option("--seed", flags.seed, "pipeline seed");
}

// config file first, then explicit flags on top
std::string build_config_json(const CLI::App* cmd, const ConfigFlags& flags) {
  json doc = json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path, std::ios::binary);
    if (!in) {
      throw std::runtime_error("cannot open config file " + flags.config_path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    doc = json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded()) {
      throw std::runtime_error("malformed config file " + flags.config_path);
    }
  }
  auto passed = [&](const char* name) { return cmd->count(name) > 0; };
  if (passed("--tile-size")) doc["tile_size_px"] = flags.tile_size;
  if (passed("--gamma")) doc["filter"]["gamma"] = flags.gamma;
  if (passed("--theta")) doc["filter"]["theta"] = flags.theta;
  if (passed("--svm-cost")) doc["filter"]["svm_cost"] = flags.svm_cost;
  if (passed("--degree")) doc["filter"]["regression_degree"] = flags.degree;
  if (passed("--ransac-iters")) doc["filter"]["ransac_iterations"] = flags.ransac_iters;
  if (passed("--solver")) doc["solver"] = flags.solver;
  if (passed("--time-budget")) doc["time_budget_s"] = flags.time_budget;
  if (passed("--segment-len")) doc["net"]["segment_len_s"] = flags.segment_len;
  if (passed("--bandwidth")) doc["net"]["bandwidth_bps"] = flags.bandwidth;
  if (passed("--rtt")) doc["net"]["rtt_s"] = flags.rtt;
  if (passed("--profile-split")) doc["profile_split"] = flags.profile_split;
  if (passed("--replay-window")) doc["replay_window"] = flags.replay_window;
  if (passed("--seed")) doc["seed"] = flags.seed;
  return doc.dump();
}

int fail(mcroi_status status) {
  std::fprintf(stderr, "error: %s\n", mcroi_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-camera RoI mask toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic trace from a scene config");
  std::string scene_path, synth_out, synth_errlog;
  synth->add_option("scene", scene_path, "scene config JSON")->required();
  synth->add_option("-o,--out", synth_out, "output trace (JSONL)")->required();
  synth->add_option("--errlog", synth_errlog, "error log path (default: <out>.errors.jsonl)");

  // offline
  auto* offline = app.add_subcommand("offline", "compute RoI masks from a profiling trace");
  std::string off_trace, off_dir = ".";
  ConfigFlags off_flags;
  offline->add_option("trace", off_trace, "profiling trace (JSONL)")->required();
  offline->add_option("--out-dir", off_dir, "output directory for the four artifacts");
  add_config_flags(offline, off_flags);

  // online
  auto* online = app.add_subcommand("online", "replay a trace through masks and groups");
  std::string on_trace, on_masks, on_groups, on_report = "replay_report.json";
  ConfigFlags on_flags;
  online->add_option("trace", on_trace, "evaluation trace (JSONL)")->required();
  online->add_option("--masks", on_masks, "masks JSON")->required();
  online->add_option("--groups", on_groups, "groups JSON")->required();
  online->add_option("-o,--out", on_report, "replay report path");
  add_config_flags(online, on_flags);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter, emit metric CSV");
  std::string sw_trace, sw_param, sw_out = "sweep.csv";
  std::vector<double> sw_values;
  ConfigFlags sw_flags;
  sweep->add_option("trace", sw_trace, "trace (JSONL)")->required();
  sweep->add_option("--param", sw_param, "gamma|theta|segment-len")
      ->required()
      ->check(CLI::IsMember({"gamma", "theta", "segment-len"}));
  sweep->add_option("--values", sw_values, "values to sweep")->required()->delimiter(',');
  sweep->add_option("-o,--out", sw_out, "output CSV path");
  add_config_flags(sweep, sw_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag misuse is an input error
  }

  try {
    if (synth->parsed()) {
      if (synth_errlog.empty()) synth_errlog = synth_out + ".errors.jsonl";
      int unseen = 0;
      mcroi_status st = mcroi_synth(scene_path.c_str(), synth_out.c_str(),
                                    synth_errlog.c_str(), &unseen);
      if (st != MCROI_OK) return fail(st);
      if (unseen > 0) {
        std::fprintf(stderr, "warning: %d object(s) never entered any camera view\n",
                     unseen);
      }
      std::printf("trace=%s errlog=%s\n", synth_out.c_str(), synth_errlog.c_str());
      return 0;
    }

    if (offline->parsed()) {
      std::string cfg = build_config_json(offline, off_flags);
      std::string masks = off_dir + "/masks.json";
      std::string groups = off_dir + "/groups.json";
      std::string report = off_dir + "/filter_report.json";
      std::string solution = off_dir + "/solution.json";
      char* stats = nullptr;
      mcroi_status st = mcroi_offline(off_trace.c_str(), cfg.c_str(), masks.c_str(),
                                      groups.c_str(), report.c_str(), solution.c_str(),
                                      &stats);
      if (st != MCROI_OK) return fail(st);
      if (stats) {
        json doc = json::parse(stats, nullptr, false);
        mcroi_string_free(stats);
        if (!doc.is_discarded()) {
          std::printf("objective=%d status=%s demands=%lld\n",
                      doc.value("objective", 0),
                      doc.value("status", std::string("?")).c_str(),
                      static_cast<long long>(doc.value("demands", 0)));
        }
      }
      return 0;
    }

    if (online->parsed()) {
      std::string cfg = build_config_json(online, on_flags);
      char* summary = nullptr;
      mcroi_status st = mcroi_online(on_trace.c_str(), on_masks.c_str(), on_groups.c_str(),
                                     cfg.c_str(), on_report.c_str(), &summary);
      if (st != MCROI_OK) return fail(st);
      if (summary) {
        json doc = json::parse(summary, nullptr, false);
        mcroi_string_free(summary);
        if (!doc.is_discarded()) {
          std::printf("accuracy=%.3f bandwidth=%.2fMbps latency=%.3fs\n",
                      doc.value("accuracy", 0.0), doc.value("bandwidth_mbps", 0.0),
                      doc.value("latency_s", 0.0));
        }
      }
      return 0;
    }

    if (sweep->parsed()) {
      std::string cfg = build_config_json(sweep, sw_flags);
      mcroi_status st = mcroi_sweep(sw_trace.c_str(), cfg.c_str(), sw_param.c_str(),
                                    sw_values.data(), sw_values.size(), sw_out.c_str());
      if (st != MCROI_OK) return fail(st);
      std::printf("csv=%s\n", sw_out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
