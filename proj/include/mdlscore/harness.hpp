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

#pragma once

// Corpus discovery, per-clip scoring, class aggregation and the sample-count
// sweep. Results are reported per file; one bad file never aborts a batch.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdlscore/audio_io.hpp"
#include "mdlscore/baselines.hpp"
#include "mdlscore/multilevel.hpp"
#include "mdlscore/spectral.hpp"

namespace mdlscore {

using LogSink = std::function<void(const std::string&)>;

struct RunConfig {
  double duration_s = 1.0;
  double offset_s = 0.0;
  std::uint64_t seed = 0;
  std::size_t k_max = 8;
  int precision_bits = 32;
  int levels = 3;
  std::optional<std::size_t> fixed_k;
  double target_mean_abs = kDefaultTargetMeanAbs;
  /// Spectrogram input is the normalized waveform times this factor, so
  /// frames are measured in 16-bit sample units by default. Code lengths
  /// depend on this scale; at full-scale units they mostly floor to zero.
  double sample_scale = kPcm16Scale;
  bool baselines = true;
  std::size_t workers = 1;
  ChannelPolicy channel_policy = ChannelPolicy::kAverage;
  SpectrogramOptions spectrogram;
  GmmOptions gmm;
  bool floor_code_lengths = true;
  bool include_model_cost = true;
  bool level3_from_level1 = false;
  LogSink log;

  /// Throws kInvalidArgument when a field is out of range.
  void validate() const;
  MultilevelOptions multilevel_options() const;
};

/// Sets one field from its textual form. Keys match the long CLI flags
/// without dashes ("seconds", "kmax", "fixed-k", "no-baselines", ...).
void set_config_value(RunConfig& config, std::string_view key,
                      std::string_view value);

struct ClipSpec {
  std::filesystem::path path;
  std::string class_name;
  std::optional<double> offset_s;
};

/// A directory yields one class per subdirectory (sorted by name) holding
/// .wav/.flac files; audio files directly inside the directory form a class
/// named after it. Any other path is read as a manifest of
/// "path,class[,offset]" lines, relative paths resolved against the manifest.
std::vector<ClipSpec> discover_corpus(const std::filesystem::path& source);

struct ClipScore {
  ScoreCard score;
  std::optional<BaselineScores> baselines;
};

/// Scores an already-cut excerpt: normalize, spectrogram, levels, baselines.
ClipScore score_waveform(const Waveform& excerpt, const RunConfig& config);

/// load -> excerpt -> normalize -> score_waveform.
ClipScore score_clip(const std::filesystem::path& path, const RunConfig& config,
                     std::optional<double> offset_s = std::nullopt);

struct ClipResult {
  ClipSpec clip;
  bool ok = false;
  std::string error;
  ClipScore result;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;
};

struct ClassSummary {
  std::string class_name;
  std::size_t count = 0;
  MetricSummary ours;
  MetricSummary katz;
  MetricSummary entropy;
  MetricSummary lz_ratio;
  MetricSummary audio_ratio;
};

/// Population mean and standard deviation.
MetricSummary summarize(std::span<const double> values);

struct BatchResult {
  std::vector<ClipResult> clips;  // sorted by path
  std::vector<ClassSummary> classes;  // first-appearance order of the input
  std::vector<std::string> warnings;
  std::size_t failures = 0;
  bool baselines = true;
  std::string lossless_codec;
};

BatchResult run_batch(const std::vector<ClipSpec>& clips,
                      const RunConfig& config);

/// class,count,ours_mean,ours_std[,katz_mean,...]
std::string batch_csv(const BatchResult& result);
/// path,class,status,ours,raw_bits,k1,k2,k3[,baselines...]
std::string batch_clips_csv(const BatchResult& result);
std::string batch_table(const BatchResult& result);

struct SweepPoint {
  std::string class_name;
  std::size_t n_samples = 0;
  double mean_score = 0.0;
  double std = 0.0;
  std::size_t clips = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<std::string> warnings;
  std::size_t failures = 0;
};

/// Mean score per (class, sample count). Excerpts are `count` samples from
/// the clip offset. Counts too short to form two spectrogram frames score 0;
/// counts longer than the clip are skipped.
SweepResult run_sweep(const std::vector<ClipSpec>& clips,
                      const RunConfig& config,
                      const std::vector<std::size_t>& counts);

/// class,n_samples,mean_score,std
std::string sweep_csv(const SweepResult& result);

}  // namespace mdlscore
