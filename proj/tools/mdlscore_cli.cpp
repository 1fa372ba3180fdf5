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

// mdlscore: score audio clips for meaningfulness from the command line.
//
//   mdlscore score FILE [flags]
//   mdlscore batch DIR|MANIFEST [flags]
//   mdlscore sweep DIR|MANIFEST --counts a,b,c [flags]

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdlscore/mdlscore.h"

namespace {

struct ConfigDeleter {
  void operator()(mdls_config* c) const { mdls_config_destroy(c); }
};
struct ScorecardDeleter {
  void operator()(mdls_scorecard* c) const { mdls_scorecard_destroy(c); }
};
struct ReportDeleter {
  void operator()(mdls_report* r) const { mdls_report_destroy(r); }
};

void log_to_stderr(const char* message, void*) { std::fprintf(stderr, "%s\n", message); }

int fail(mdls_status status, const std::string& context) {
  std::fprintf(stderr, "mdlscore: %s: %s (%s)\n", context.c_str(), mdls_last_error(),
               mdls_status_string(status));
  return 1;
}

bool write_text(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::fprintf(stderr, "mdlscore: cannot write %s\n", path.c_str());
    return false;
  }
  return true;
}

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// Flags forwarded to the library as key=value pairs.
struct ForwardedOption {
  const char* name;
  const char* help;
};

constexpr ForwardedOption kValueOptions[] = {
    {"seconds", "Excerpt duration in seconds (default 1.0)"},
    {"offset", "Excerpt start in seconds (default 0)"},
    {"seed", "Random seed for clustering (default 0)"},
    {"kmax", "Largest K in the MDL sweep (default 8)"},
    {"precision", "Bits per coordinate of the direct code (default 32)"},
    {"levels", "Clustering levels, 1-3 (default 3)"},
    {"fixed-k", "Skip the K sweep and use this K at every level"},
    {"target-amp", "Mean absolute amplitude after normalization (default 0.1)"},
    {"sample-scale", "Factor applied to samples before the spectrogram (default 32768)"},
    {"workers", "Clips scored in parallel (default 1)"},
    {"window", "Spectrogram window and FFT size (default 30)"},
    {"overlap", "Spectrogram window overlap (default 3)"},
    {"restarts", "EM restarts per K (default 10)"},
    {"max-iter", "EM iteration cap (default 100)"},
    {"tol", "EM tolerance on mean log-likelihood gain (default 1e-3)"},
    {"channel-policy", "Multichannel downmix: average or first"},
    {"model-cost-in-selection", "Rank K by point, label and model bits (true|false)"},
    {"floor-code-lengths", "Floor negative code lengths at zero (true|false)"},
};

constexpr ForwardedOption kFlagOptions[] = {
    {"no-baselines", "Skip the four baseline metrics"},
    {"log-magnitude", "Cluster log(1+|X|) spectra instead of magnitudes"},
    {"level3-from-level1", "Build level 3 from level-1 labels in chunks of 4"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meaningfulness scores for audio via minimum description length clustering"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read flags from a key=value file (command line wins)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_version_flag("--version", std::string(mdls_version()));

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> value_opts;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const auto& o : kValueOptions) {
    value_opts[o.name] = app.add_option(std::string("--") + o.name, values[o.name], o.help);
  }
  for (const auto& o : kFlagOptions) {
    flag_opts[o.name] = app.add_flag(std::string("--") + o.name, o.help);
  }
  std::string out_path;
  bool quiet = false;
  app.add_option("--out", out_path, "Write CSV results to this file");
  app.add_flag("--quiet,-q", quiet, "Suppress progress output on stderr");

  std::string score_file;
  auto* score_cmd = app.add_subcommand("score", "Score one audio file");
  score_cmd->add_option("FILE", score_file, "WAV or FLAC file")->required();
  score_cmd->fallthrough();

  std::string batch_source;
  std::string clips_out;
  bool print_csv = false;
  auto* batch_cmd = app.add_subcommand("batch", "Score a corpus and summarize per class");
  batch_cmd->add_option("SOURCE", batch_source, "Corpus directory or manifest")->required();
  batch_cmd->add_option("--clips-out", clips_out, "Write per-clip CSV to this file");
  batch_cmd->add_flag("--csv", print_csv, "Print CSV instead of the aligned table");
  batch_cmd->fallthrough();

  std::string sweep_source;
  std::vector<std::size_t> counts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Mean score per class versus sample count");
  sweep_cmd->add_option("SOURCE", sweep_source, "Corpus directory or manifest")->required();
  sweep_cmd->add_option("--counts", counts, "Comma-separated sample counts")
      ->delimiter(',')
      ->required();
  sweep_cmd->fallthrough();

  CLI11_PARSE(app, argc, argv);

  mdls_config* raw_config = nullptr;
  if (const auto st = mdls_config_create(&raw_config); st != MDLS_OK) {
    return fail(st, "config");
  }
  std::unique_ptr<mdls_config, ConfigDeleter> config(raw_config);
  for (const auto& [name, opt] : value_opts) {
    if (opt->count() == 0) continue;
    if (const auto st = mdls_config_set(config.get(), name.c_str(), values[name].c_str());
        st != MDLS_OK) {
      return fail(st, "--" + name);
    }
  }
  for (const auto& [name, opt] : flag_opts) {
    if (opt->count() == 0) continue;
    if (const auto st = mdls_config_set(config.get(), name.c_str(), "true"); st != MDLS_OK) {
      return fail(st, "--" + name);
    }
  }
  if (!quiet) mdls_config_set_logger(config.get(), log_to_stderr, nullptr);

  if (*score_cmd) {
    mdls_scorecard* raw = nullptr;
    if (const auto st = mdls_score_file(config.get(), score_file.c_str(), &raw);
        st != MDLS_OK) {
      return fail(st, score_file);
    }
    std::unique_ptr<mdls_scorecard, ScorecardDeleter> card(raw);
    std::printf("file: %s\n", score_file.c_str());
    std::printf("score: %s\n", fmt(mdls_scorecard_normalized(card.get())).c_str());
    std::printf("raw_bits: %s\n", fmt(mdls_scorecard_raw_bits(card.get())).c_str());
    std::string ks[3];
    for (size_t i = 0; i < mdls_scorecard_level_count(card.get()); ++i) {
      mdls_level_info info;
      mdls_scorecard_level(card.get(), i, &info);
      if (info.skipped) {
        std::printf("level %d: skipped (n=%zu)\n", info.level, info.n);
        continue;
      }
      if (i < 3) ks[i] = std::to_string(info.k);
      std::printf(
          "level %d: n=%zu dim=%zu K=%zu nonempty=%zu outliers=%zu label_bits=%s "
          "model_bits=%s bits=%s\n",
          info.level, info.n, info.dim, info.k, info.nonempty, info.outliers,
          fmt(info.label_bits, 3).c_str(), fmt(info.model_bits, 1).c_str(),
          fmt(info.meaningful_bits, 3).c_str());
    }
    mdls_baselines b{};
    const bool have_b = mdls_scorecard_baselines(card.get(), &b) != 0;
    if (have_b) {
      std::printf("katz_fd: %s\n", fmt(b.katz_fd).c_str());
      std::printf("spectrogram_entropy: %s\n", fmt(b.spectrogram_entropy).c_str());
      std::printf("lz_spectrogram_ratio: %s\n", fmt(b.lz_spectrogram_ratio).c_str());
      std::printf("lossless_audio_ratio: %s\n", fmt(b.lossless_audio_ratio).c_str());
      std::printf("lossless_codec: %s\n", mdls_scorecard_codec(card.get()));
    }
    if (!out_path.empty()) {
      std::string csv = "path,ours,raw_bits,k1,k2,k3";
      if (have_b) csv += ",katz,entropy,lz_ratio,audio_ratio";
      csv += "\n" + score_file + "," + fmt(mdls_scorecard_normalized(card.get())) + "," +
             fmt(mdls_scorecard_raw_bits(card.get())) + "," + ks[0] + "," + ks[1] + "," +
             ks[2];
      if (have_b) {
        csv += "," + fmt(b.katz_fd) + "," + fmt(b.spectrogram_entropy) + "," +
               fmt(b.lz_spectrogram_ratio) + "," + fmt(b.lossless_audio_ratio);
      }
      csv += "\n";
      if (!write_text(out_path, csv.c_str())) return 1;
    }
    return 0;
  }

  mdls_report* raw_report = nullptr;
  mdls_status st;
  if (*batch_cmd) {
    st = mdls_batch_run(config.get(), batch_source.c_str(), &raw_report);
    if (st != MDLS_OK) return fail(st, batch_source);
  } else {
    st = mdls_sweep_run(config.get(), sweep_source.c_str(), counts.data(), counts.size(),
                        &raw_report);
    if (st != MDLS_OK) return fail(st, sweep_source);
  }
  std::unique_ptr<mdls_report, ReportDeleter> report(raw_report);

  if (*batch_cmd) {
    std::fputs(print_csv ? mdls_report_csv(report.get()) : mdls_report_table(report.get()),
               stdout);
    if (!clips_out.empty() && !write_text(clips_out, mdls_report_clips_csv(report.get()))) {
      return 1;
    }
  } else if (out_path.empty()) {
    std::fputs(mdls_report_csv(report.get()), stdout);
  }
  if (!out_path.empty() && !write_text(out_path, mdls_report_csv(report.get()))) return 1;
  return mdls_report_failure_count(report.get()) == 0 ? 0 : 1;
}
