// Copyright 2026 The mdlscore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mdlscore/mdlscore.h"

#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "mdlscore/error.hpp"
#include "mdlscore/flac.hpp"
#include "mdlscore/harness.hpp"

struct mdls_config {
  mdlscore::RunConfig config;
  mdls_log_fn log_fn = nullptr;
  void* log_user = nullptr;
};

struct mdls_scorecard {
  mdlscore::ClipScore score;
  std::string codec;
};

struct mdls_report {
  std::string csv;
  std::string clips_csv;
  std::string table;
  std::vector<std::string> warnings;
  std::size_t failures = 0;
};

namespace {

thread_local std::string last_error;

mdls_status to_status(mdlscore::ErrorCode code) {
  using mdlscore::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return MDLS_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIo: return MDLS_ERR_IO;
    case ErrorCode::kUnsupportedFormat: return MDLS_ERR_UNSUPPORTED_FORMAT;
    case ErrorCode::kDegenerateInput: return MDLS_ERR_DEGENERATE_INPUT;
    case ErrorCode::kOutOfRange: return MDLS_ERR_OUT_OF_RANGE;
    case ErrorCode::kEncoder: return MDLS_ERR_ENCODER;
    case ErrorCode::kInternal: return MDLS_ERR_INTERNAL;
  }
  return MDLS_ERR_INTERNAL;
}

template <class Fn>
mdls_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return MDLS_OK;
  } catch (const mdlscore::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MDLS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MDLS_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return MDLS_ERR_INTERNAL;
  }
}

mdls_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return MDLS_ERR_INVALID_ARGUMENT;
}

mdlscore::RunConfig with_logger(const mdls_config* c) {
  mdlscore::RunConfig config = c->config;
  if (c->log_fn) {
    const mdls_log_fn fn = c->log_fn;
    void* user = c->log_user;
    config.log = [fn, user](const std::string& m) { fn(m.c_str(), user); };
  }
  return config;
}

}  // namespace

extern "C" {

const char* mdls_version(void) { return "0.1.0"; }

const char* mdls_status_string(mdls_status status) {
  switch (status) {
    case MDLS_OK: return "ok";
    case MDLS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MDLS_ERR_IO: return "i/o error";
    case MDLS_ERR_UNSUPPORTED_FORMAT: return "unsupported format";
    case MDLS_ERR_DEGENERATE_INPUT: return "degenerate input";
    case MDLS_ERR_OUT_OF_RANGE: return "out of range";
    case MDLS_ERR_ENCODER: return "encoder failure";
    case MDLS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mdls_last_error(void) { return last_error.c_str(); }

mdls_status mdls_config_create(mdls_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new mdls_config(); });
}

void mdls_config_destroy(mdls_config* config) { delete config; }

mdls_status mdls_config_set(mdls_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] {
    mdlscore::RunConfig updated = config->config;
    mdlscore::set_config_value(updated, key, value);
    updated.validate();
    config->config = std::move(updated);
  });
}

mdls_status mdls_config_set_logger(mdls_config* config, mdls_log_fn fn, void* user_data) {
  if (!config) return null_argument("config");
  config->log_fn = fn;
  config->log_user = user_data;
  return MDLS_OK;
}

mdls_status mdls_score_file(const mdls_config* config, const char* path,
                            mdls_scorecard** out) {
  if (!config || !path || !out) return null_argument("config/path/out");
  return guarded([&] {
    auto card = std::make_unique<mdls_scorecard>();
    card->score = mdlscore::score_clip(path, with_logger(config));
    card->codec = mdlscore::flac::kEncoderName;
    *out = card.release();
  });
}

mdls_status mdls_score_samples(const mdls_config* config, const double* samples,
                               size_t count, unsigned sample_rate, mdls_scorecard** out) {
  if (!config || !out || (!samples && count > 0)) return null_argument("config/samples/out");
  return guarded([&] {
    if (sample_rate == 0) {
      throw mdlscore::Error(mdlscore::ErrorCode::kInvalidArgument, "sample rate must be > 0");
    }
    const mdlscore::RunConfig run = with_logger(config);
    run.validate();
    mdlscore::Waveform w;
    w.sample_rate = sample_rate;
    w.samples.assign(samples, samples + count);
    auto card = std::make_unique<mdls_scorecard>();
    card->score = mdlscore::score_waveform(w, run);
    card->codec = mdlscore::flac::kEncoderName;
    *out = card.release();
  });
}

void mdls_scorecard_destroy(mdls_scorecard* card) { delete card; }

double mdls_scorecard_normalized(const mdls_scorecard* card) {
  return card ? card->score.score.normalized_score : 0.0;
}

double mdls_scorecard_raw_bits(const mdls_scorecard* card) {
  return card ? card->score.score.raw_bits_total : 0.0;
}

size_t mdls_scorecard_level_count(const mdls_scorecard* card) {
  return card ? card->score.score.levels.size() : 0;
}

mdls_status mdls_scorecard_level(const mdls_scorecard* card, size_t index,
                                 mdls_level_info* out) {
  if (!card || !out) return null_argument("card/out");
  if (index >= card->score.score.levels.size()) {
    last_error = "level index out of range";
    return MDLS_ERR_OUT_OF_RANGE;
  }
  const auto& l = card->score.score.levels[index];
  out->level = l.level;
  out->n = l.n;
  out->dim = l.dim;
  out->k = l.k;
  out->nonempty = l.nonempty_clusters;
  out->outliers = l.outliers;
  out->label_bits = l.label_info_bits;
  out->model_bits = l.model_bits;
  out->meaningful_bits = l.meaningful_bits;
  out->skipped = l.skipped ? 1 : 0;
  return MDLS_OK;
}

int mdls_scorecard_baselines(const mdls_scorecard* card, mdls_baselines* out) {
  if (!card || !card->score.baselines) return 0;
  if (out) {
    const auto& b = *card->score.baselines;
    out->spectrogram_entropy = b.spectrogram_entropy;
    out->katz_fd = b.katz_fd;
    out->lz_spectrogram_ratio = b.lz_spectrogram_ratio;
    out->lossless_audio_ratio = b.lossless_audio_ratio;
  }
  return 1;
}

const char* mdls_scorecard_codec(const mdls_scorecard* card) {
  return card ? card->codec.c_str() : "";
}

mdls_status mdls_batch_run(const mdls_config* config, const char* source,
                           mdls_report** out) {
  if (!config || !source || !out) return null_argument("config/source/out");
  return guarded([&] {
    const auto clips = mdlscore::discover_corpus(source);
    const auto result = mdlscore::run_batch(clips, with_logger(config));
    auto report = std::make_unique<mdls_report>();
    report->csv = mdlscore::batch_csv(result);
    report->clips_csv = mdlscore::batch_clips_csv(result);
    report->table = mdlscore::batch_table(result);
    report->warnings = result.warnings;
    report->failures = result.failures;
    *out = report.release();
  });
}

mdls_status mdls_sweep_run(const mdls_config* config, const char* source,
                           const size_t* counts, size_t count_len, mdls_report** out) {
  if (!config || !source || !out || (!counts && count_len > 0)) {
    return null_argument("config/source/counts/out");
  }
  return guarded([&] {
    const auto clips = mdlscore::discover_corpus(source);
    const std::vector<std::size_t> list(counts, counts + count_len);
    const auto result = mdlscore::run_sweep(clips, with_logger(config), list);
    auto report = std::make_unique<mdls_report>();
    report->csv = mdlscore::sweep_csv(result);
    report->table = report->csv;
    report->warnings = result.warnings;
    report->failures = result.failures;
    *out = report.release();
  });
}

void mdls_report_destroy(mdls_report* report) { delete report; }

const char* mdls_report_csv(const mdls_report* report) {
  return report ? report->csv.c_str() : "";
}

const char* mdls_report_clips_csv(const mdls_report* report) {
  return report ? report->clips_csv.c_str() : "";
}

const char* mdls_report_table(const mdls_report* report) {
  return report ? report->table.c_str() : "";
}

size_t mdls_report_failure_count(const mdls_report* report) {
  return report ? report->failures : 0;
}

size_t mdls_report_warning_count(const mdls_report* report) {
  return report ? report->warnings.size() : 0;
}

const char* mdls_report_warning(const mdls_report* report, size_t index) {
  if (!report || index >= report->warnings.size()) return "";
  return report->warnings[index].c_str();
}

}  // extern "C"
