#include "mcroi.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "mcroi/error.hpp"
#include "mcroi/pipeline.hpp"
#include "mcroi/serde.hpp"
#include "mcroi/trace.hpp"

struct mcroi_trace {
  mcroi::Trace trace;
};

namespace {

thread_local std::string g_last_error;

mcroi_status status_of(const mcroi::Error& e) {
  g_last_error = e.what();
  switch (e.kind()) {
    case mcroi::ErrorKind::Consistency:
      return MCROI_ERR_CONSISTENCY;
    case mcroi::ErrorKind::InvalidInput:
    case mcroi::ErrorKind::InsufficientData:
    case mcroi::ErrorKind::Degenerate:
    case mcroi::ErrorKind::Io:
      return MCROI_ERR_INPUT;
  }
  return MCROI_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::operator new(s.size() + 1, std::nothrow));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
mcroi_status guarded(Fn&& fn) {
  try {
    fn();
    return MCROI_OK;
  } catch (const mcroi::Error& e) {
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MCROI_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MCROI_ERR_INTERNAL;
  }
}

mcroi::PipelineConfig parse_config(const char* config_json) {
  return mcroi::pipeline_config_from_json(config_json ? config_json : "");
}

}  // namespace

extern "C" {

const char* mcroi_version(void) { return "0.1.0"; }

const char* mcroi_last_error(void) { return g_last_error.c_str(); }

void mcroi_string_free(char* s) { ::operator delete(s, std::nothrow); }

mcroi_status mcroi_trace_load(const char* path, mcroi_trace** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return MCROI_ERR_INPUT;
  }
  *out = nullptr;
  return guarded([&] {
    auto* handle = new mcroi_trace{mcroi::load_trace(path)};
    *out = handle;
  });
}

void mcroi_trace_free(mcroi_trace* trace) { delete trace; }

int64_t mcroi_trace_record_count(const mcroi_trace* trace) {
  return trace ? static_cast<int64_t>(trace->trace.records.size()) : 0;
}

int mcroi_trace_camera_count(const mcroi_trace* trace) {
  return trace ? static_cast<int>(trace->trace.cameras.size()) : 0;
}

double mcroi_trace_frame_rate(const mcroi_trace* trace) {
  return trace ? trace->trace.frame_rate_hz : 0.0;
}

mcroi_status mcroi_synth(const char* scene_config_path, const char* out_trace_path,
                         const char* out_error_log_path, int* out_unseen) {
  if (!scene_config_path || !out_trace_path || !out_error_log_path) {
    g_last_error = "null argument";
    return MCROI_ERR_INPUT;
  }
  return guarded([&] {
    int unseen = mcroi::run_synth(scene_config_path, out_trace_path, out_error_log_path);
    if (out_unseen) *out_unseen = unseen;
  });
}

mcroi_status mcroi_offline(const char* trace_path, const char* config_json,
                           const char* out_masks_path, const char* out_groups_path,
                           const char* out_filter_report_path,
                           const char* out_solution_path, char** out_stats_json) {
  if (!trace_path || !out_masks_path || !out_groups_path || !out_filter_report_path ||
      !out_solution_path) {
    g_last_error = "null argument";
    return MCROI_ERR_INPUT;
  }
  return guarded([&] {
    std::string stats =
        mcroi::run_offline(trace_path, parse_config(config_json), out_masks_path,
                           out_groups_path, out_filter_report_path, out_solution_path);
    if (out_stats_json) *out_stats_json = dup_string(stats);
  });
}

mcroi_status mcroi_online(const char* trace_path, const char* masks_path,
                          const char* groups_path, const char* config_json,
                          const char* out_report_path, char** out_summary_json) {
  if (!trace_path || !masks_path || !groups_path || !out_report_path) {
    g_last_error = "null argument";
    return MCROI_ERR_INPUT;
  }
  return guarded([&] {
    std::string summary = mcroi::run_online(trace_path, masks_path, groups_path,
                                            parse_config(config_json), out_report_path);
    if (out_summary_json) *out_summary_json = dup_string(summary);
  });
}

mcroi_status mcroi_sweep(const char* trace_path, const char* config_json,
                         const char* param, const double* values, size_t value_count,
                         const char* out_csv_path) {
  if (!trace_path || !param || !values || !out_csv_path) {
    g_last_error = "null argument";
    return MCROI_ERR_INPUT;
  }
  return guarded([&] {
    std::vector<double> vals(values, values + value_count);
    mcroi::run_sweep(trace_path, parse_config(config_json), param, vals, out_csv_path);
  });
}

}  // extern "C"
