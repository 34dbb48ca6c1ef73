/* C interface to the multi-camera RoI toolkit.
 *
 * All functions return mcroi_status; on failure mcroi_last_error() holds a
 * thread-local message describing what went wrong. Strings returned through
 * out-parameters are heap-allocated and must be released with
 * mcroi_string_free().
 */
#ifndef MCROI_H
#define MCROI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcroi_status {
  MCROI_OK = 0,
  MCROI_ERR_INPUT = 2,       /* malformed or out-of-contract input */
  MCROI_ERR_CONSISTENCY = 3, /* mutually inconsistent artifacts */
  MCROI_ERR_INTERNAL = 4
} mcroi_status;

const char* mcroi_version(void);

/* message for the most recent failure on this thread; never NULL */
const char* mcroi_last_error(void);

void mcroi_string_free(char* s);

/* ------------------------------------------------------------------ */
/* traces                                                               */

typedef struct mcroi_trace mcroi_trace;

mcroi_status mcroi_trace_load(const char* path, mcroi_trace** out);
void mcroi_trace_free(mcroi_trace* trace);
int64_t mcroi_trace_record_count(const mcroi_trace* trace);
int mcroi_trace_camera_count(const mcroi_trace* trace);
double mcroi_trace_frame_rate(const mcroi_trace* trace);

/* ------------------------------------------------------------------ */
/* pipeline entry points; config_json may be NULL or "" for defaults   */

/* generate a synthetic trace plus an error-injection log; out_unseen
 * (optional) receives the number of configured objects that never entered
 * any camera's view */
mcroi_status mcroi_synth(const char* scene_config_path, const char* out_trace_path,
                         const char* out_error_log_path, int* out_unseen);

/* offline phase: filter -> associate -> optimize -> group; writes the four
 * artifacts and (optionally) returns the solution stats JSON */
mcroi_status mcroi_offline(const char* trace_path, const char* config_json,
                           const char* out_masks_path, const char* out_groups_path,
                           const char* out_filter_report_path,
                           const char* out_solution_path, char** out_stats_json);

/* online phase: replay the trace through masks/groups; writes the replay
 * report and (optionally) returns a one-line summary JSON */
mcroi_status mcroi_online(const char* trace_path, const char* masks_path,
                          const char* groups_path, const char* config_json,
                          const char* out_report_path, char** out_summary_json);

/* parameter sweep; param is "gamma", "theta" or "segment-len" */
mcroi_status mcroi_sweep(const char* trace_path, const char* config_json,
                         const char* param, const double* values, size_t value_count,
                         const char* out_csv_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MCROI_H */
