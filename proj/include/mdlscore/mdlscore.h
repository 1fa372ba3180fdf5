/*
 * Copyright 2026 The mdlscore Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libmdlscore.
 *
 * Every object is an opaque handle created by a *_create / *_run function and
 * released with the matching *_destroy. Functions that can fail return an
 * mdls_status; on failure mdls_last_error() describes the problem for the
 * calling thread. Strings returned by accessors are owned by the handle and
 * stay valid until it is destroyed.
 *
 * Configuration keys accepted by mdls_config_set (values are text):
 *   seconds, offset, seed, kmax, precision, levels, fixed-k, target-amp,
 *   sample-scale, no-baselines, baselines, workers, window, overlap,
 *   log-magnitude, tol, max-iter, restarts, floor-code-lengths,
 *   model-cost-in-selection, level3-from-level1, channel-policy
 *   (average|first)
 */
#ifndef MDLSCORE_MDLSCORE_H_
#define MDLSCORE_MDLSCORE_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdls_status {
  MDLS_OK = 0,
  MDLS_ERR_INVALID_ARGUMENT = 1,
  MDLS_ERR_IO = 2,
  MDLS_ERR_UNSUPPORTED_FORMAT = 3,
  MDLS_ERR_DEGENERATE_INPUT = 4,
  MDLS_ERR_OUT_OF_RANGE = 5,
  MDLS_ERR_ENCODER = 6,
  MDLS_ERR_INTERNAL = 7
} mdls_status;

typedef struct mdls_config mdls_config;
typedef struct mdls_scorecard mdls_scorecard;
typedef struct mdls_report mdls_report;

typedef void (*mdls_log_fn)(const char* message, void* user_data);

typedef struct mdls_level_info {
  int level;
  size_t n;           /* points at this level */
  size_t dim;         /* point dimension */
  size_t k;           /* components of the kept partition */
  size_t nonempty;    /* clusters with at least one point */
  size_t outliers;    /* points coded without their cluster */
  double label_bits;  /* label information of inliers */
  double model_bits;  /* 2*c*m per nonempty cluster */
  double meaningful_bits;
  int skipped;        /* nonzero when the level had too few points */
} mdls_level_info;

typedef struct mdls_baselines {
  double spectrogram_entropy;
  double katz_fd;
  double lz_spectrogram_ratio;
  double lossless_audio_ratio;
} mdls_baselines;

const char* mdls_version(void);
const char* mdls_status_string(mdls_status status);
/* Message for the most recent failure on this thread; "" if none. */
const char* mdls_last_error(void);

mdls_status mdls_config_create(mdls_config** out);
void mdls_config_destroy(mdls_config* config);
mdls_status mdls_config_set(mdls_config* config, const char* key, const char* value);
/* Progress and warnings. The callback may be invoked from worker threads, one
 * call at a time. Pass NULL to silence. */
mdls_status mdls_config_set_logger(mdls_config* config, mdls_log_fn fn, void* user_data);

/* load -> excerpt (offset, seconds) -> normalize -> score. */
mdls_status mdls_score_file(const mdls_config* config, const char* path,
                            mdls_scorecard** out);
/* Scores an in-memory mono excerpt as given (no excerpting). */
mdls_status mdls_score_samples(const mdls_config* config, const double* samples,
                               size_t count, unsigned sample_rate, mdls_scorecard** out);
void mdls_scorecard_destroy(mdls_scorecard* card);
double mdls_scorecard_normalized(const mdls_scorecard* card);
double mdls_scorecard_raw_bits(const mdls_scorecard* card);
size_t mdls_scorecard_level_count(const mdls_scorecard* card);
mdls_status mdls_scorecard_level(const mdls_scorecard* card, size_t index,
                                 mdls_level_info* out);
/* Returns 1 and fills `out` when baselines were computed, else 0. */
int mdls_scorecard_baselines(const mdls_scorecard* card, mdls_baselines* out);
const char* mdls_scorecard_codec(const mdls_scorecard* card);

/* `source` is a corpus directory (one subdirectory per class) or a manifest
 * of "path,class[,offset]" lines. Per-file failures are recorded in the
 * report, not returned. */
mdls_status mdls_batch_run(const mdls_config* config, const char* source,
                           mdls_report** out);
mdls_status mdls_sweep_run(const mdls_config* config, const char* source,
                           const size_t* counts, size_t count_len, mdls_report** out);
void mdls_report_destroy(mdls_report* report);
/* Batch: class,count,ours_mean,ours_std[,baseline means/stds].
 * Sweep: class,n_samples,mean_score,std. */
const char* mdls_report_csv(const mdls_report* report);
/* Batch only: one row per clip. Empty for sweeps. */
const char* mdls_report_clips_csv(const mdls_report* report);
const char* mdls_report_table(const mdls_report* report);
size_t mdls_report_failure_count(const mdls_report* report);
size_t mdls_report_warning_count(const mdls_report* report);
/* "" when index is out of range. */
const char* mdls_report_warning(const mdls_report* report, size_t index);

#ifdef __cplusplus
}
#endif

#endif /* MDLSCORE_MDLSCORE_H_ */
