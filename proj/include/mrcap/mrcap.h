/*
 * Copyright 2026 The mrcap Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the mrcap benchmark harness: MapReduce mini-apps (map_shuffle,
 * group_by_key, reduce_by_key) over an in-memory runtime, measured under
 * power caps via a simulated power model or the Linux RAPL powercap sysfs.
 *
 * All functions return MRCAP_OK on success. Functions taking an experiment
 * handle report details through mrcap_experiment_error(); the handle-less
 * entry points report through mrcap_last_error().
 */

#ifndef MRCAP_MRCAP_H
#define MRCAP_MRCAP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrcap_status {
  MRCAP_OK = 0,
  MRCAP_ERR_INVALID = 1,    /* bad configuration or arguments */
  MRCAP_ERR_CAPABILITY = 2, /* backend unavailable (e.g. no RAPL sysfs) */
  MRCAP_ERR_IO = 3,
  MRCAP_ERR_INTERNAL = 4,
} mrcap_status;

const char* mrcap_version(void);

/* Message for the most recent failure of a handle-less call, owned by the
 * library, valid until the next such call on the same thread. */
const char* mrcap_last_error(void);

/* --- experiment matrix ------------------------------------------------ */

typedef struct mrcap_experiment mrcap_experiment;

mrcap_experiment* mrcap_experiment_new(void);
void mrcap_experiment_free(mrcap_experiment* exp);
const char* mrcap_experiment_error(const mrcap_experiment* exp);

/* Comma-separated list of map_shuffle, group_by_key, reduce_by_key, or
 * "all". */
mrcap_status mrcap_experiment_set_apps(mrcap_experiment* exp,
                                       const char* apps);
mrcap_status mrcap_experiment_set_dataset(mrcap_experiment* exp,
                                          uint64_t total_words,
                                          uint64_t unique_words,
                                          uint64_t seed);
mrcap_status mrcap_experiment_set_unique_words_sweep(mrcap_experiment* exp,
                                                     const uint64_t* values,
                                                     size_t count);
mrcap_status mrcap_experiment_set_ranks(mrcap_experiment* exp,
                                        uint32_t ranks);
mrcap_status mrcap_experiment_set_buffer_kvs(mrcap_experiment* exp,
                                             uint64_t capacity);
/* Comma-separated watts or "none", e.g. "none,140,120". */
mrcap_status mrcap_experiment_set_caps(mrcap_experiment* exp,
                                       const char* caps);
/* "sim" or "rapl". */
mrcap_status mrcap_experiment_set_backend(mrcap_experiment* exp,
                                          const char* backend);
mrcap_status mrcap_experiment_set_sim_model_file(mrcap_experiment* exp,
                                                 const char* path);
/* Override of the powercap sysfs root; NULL restores the default
 * (MRCAP_POWERCAP_ROOT env var, then /sys/class/powercap). */
mrcap_status mrcap_experiment_set_powercap_root(mrcap_experiment* exp,
                                                const char* root);
mrcap_status mrcap_experiment_set_sample_ms(mrcap_experiment* exp,
                                            double sample_ms);
mrcap_status mrcap_experiment_set_reps(mrcap_experiment* exp, uint32_t reps);
mrcap_status mrcap_experiment_set_sampler_enabled(mrcap_experiment* exp,
                                                  int enabled);
/* trace_dir may be NULL to skip trace files. */
mrcap_status mrcap_experiment_set_output(mrcap_experiment* exp,
                                         const char* csv_path,
                                         const char* trace_dir);

/* Runs every (app x unique_words x cap x rep) cell sequentially and writes
 * the CSV (and trace files). Returns the number of rows written through
 * rows_out when non-NULL. */
mrcap_status mrcap_experiment_run(mrcap_experiment* exp, size_t* rows_out);

/* --- analysis --------------------------------------------------------- */

/* Summary table for a results CSV; *out is malloc'd text, release with
 * mrcap_string_free. */
mrcap_status mrcap_summarize_file(const char* csv_path, char** out);

/* Figure-1-style power-vs-time SVG from rep-1 trace files in trace_dir.
 * app_filter may be NULL or "" for all apps. */
mrcap_status mrcap_plot_traces(const char* trace_dir, const char* app_filter,
                               const char* out_svg_path);

void mrcap_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MRCAP_MRCAP_H */
