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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../support/corpus.hpp"
#include "doctest.h"
#include "mdlscore/error.hpp"
#include "mdlscore/harness.hpp"

using namespace mdlscore;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

RunConfig quick_config() {
  RunConfig cfg;
  cfg.duration_s = 0.25;
  cfg.gmm.restarts = 2;
  return cfg;
}

}  // namespace

TEST_CASE("config keys parse and unknown keys are rejected") {
  RunConfig cfg;
  set_config_value(cfg, "--seconds", "0.5");
  set_config_value(cfg, "kmax", "4");
  set_config_value(cfg, "fixed_k", "5");
  set_config_value(cfg, "NO-BASELINES", "true");
  set_config_value(cfg, "target-amp", "0.2");
  set_config_value(cfg, "channel-policy", "first");
  CHECK(cfg.duration_s == 0.5);
  CHECK(cfg.k_max == 4);
  CHECK(cfg.fixed_k == 5u);
  CHECK_FALSE(cfg.baselines);
  CHECK(cfg.target_mean_abs == 0.2);
  CHECK(cfg.channel_policy == ChannelPolicy::kFirst);
  set_config_value(cfg, "fixed-k", "none");
  CHECK_FALSE(cfg.fixed_k.has_value());
  CHECK_THROWS_AS(set_config_value(cfg, "bogus", "1"), Error);
  CHECK_THROWS_AS(set_config_value(cfg, "seed", "abc"), Error);
  CHECK_THROWS_AS(set_config_value(cfg, "kmax", "-2"), Error);
  cfg.levels = 4;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("directories and manifests both describe a corpus") {
  const auto root = testsupport::scratch_dir("discover");
  testsupport::write_synthetic_corpus(root, {"noise", "tones"}, 2, 12000);
  testsupport::write_float_wav(root / "loose.wav", testsupport::white_noise(9, 12000));
  const auto clips = discover_corpus(root);
  REQUIRE(clips.size() == 5);
  CHECK(clips[0].class_name == root.filename().string());
  CHECK(clips[1].class_name == "noise");
  CHECK(clips[4].class_name == "tones");

  std::ofstream(root / "list.csv") << "# comment\n"
                                      "tones/tones1.wav,speechlike,0.05\n"
                                      "noise/noise0.wav,rain\n";
  const auto listed = discover_corpus(root / "list.csv");
  REQUIRE(listed.size() == 2);
  CHECK(listed[0].class_name == "speechlike");
  CHECK(listed[0].offset_s == 0.05);
  CHECK(listed[0].path == root / "tones/tones1.wav");
  CHECK_FALSE(listed[1].offset_s.has_value());
  CHECK_THROWS_AS(discover_corpus(root / "missing"), Error);
  fs::remove_all(root);
}

TEST_CASE("batch summaries, CSV schema and per-file failures") {
  const auto root = testsupport::scratch_dir("batch");
  testsupport::write_synthetic_corpus(root, {"noise", "tones"}, 1, 12000);
  fs::create_directories(root / "broken");
  std::ofstream(root / "broken" / "bad.wav") << "not audio";
  const auto result = run_batch(discover_corpus(root), quick_config());
  CHECK(result.failures == 1);
  REQUIRE(result.classes.size() == 2);
  for (const auto& cls : result.classes) {
    CHECK(cls.count == 1);
    CHECK(cls.ours.std == 0.0);
  }
  const auto csv = lines(batch_csv(result));
  CHECK(csv[0] ==
        "class,count,ours_mean,ours_std,katz_mean,katz_std,entropy_mean,entropy_std,"
        "lz_ratio_mean,lz_ratio_std,audio_ratio_mean,audio_ratio_std");
  CHECK(csv.size() == 3);
  for (const auto& clip : result.clips) {
    if (!clip.ok) continue;
    const std::string& cls = clip.clip.class_name;
    for (const auto& summary : result.classes) {
      if (summary.class_name == cls) CHECK(summary.ours.mean == clip.result.score.normalized_score);
    }
  }
  const auto per_clip = lines(batch_clips_csv(result));
  CHECK(per_clip.size() == 4);
  CHECK(per_clip[0].rfind("path,class,status,ours,raw_bits,k1,k2,k3", 0) == 0);
  CHECK(batch_table(result).find("tones") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("identical files give zero spread and workers do not change results") {
  const auto root = testsupport::scratch_dir("twins");
  const auto w = testsupport::tone_sequence(4, 12000);
  testsupport::write_float_wav(root / "twin" / "a.wav", w);
  testsupport::write_float_wav(root / "twin" / "b.wav", w);
  testsupport::write_float_wav(root / "other" / "c.wav", testsupport::white_noise(1, 12000));
  auto cfg = quick_config();
  const auto serial = run_batch(discover_corpus(root), cfg);
  cfg.workers = 3;
  const auto parallel = run_batch(discover_corpus(root), cfg);
  CHECK(batch_csv(serial) == batch_csv(parallel));
  CHECK(batch_clips_csv(serial) == batch_clips_csv(parallel));
  for (const auto& cls : serial.classes) {
    if (cls.class_name == "twin") {
      CHECK(cls.count == 2);
      CHECK(cls.ours.std == 0.0);
    }
  }
  fs::remove_all(root);
}

TEST_CASE("no baselines drops the baseline columns") {
  const auto root = testsupport::scratch_dir("nobase");
  testsupport::write_synthetic_corpus(root, {"noise"}, 1, 12000);
  auto cfg = quick_config();
  cfg.baselines = false;
  const auto result = run_batch(discover_corpus(root), cfg);
  CHECK(lines(batch_csv(result))[0] == "class,count,ours_mean,ours_std");
  fs::remove_all(root);
}

TEST_CASE("sweep rows, short counts and long counts") {
  const auto root = testsupport::scratch_dir("sweep");
  testsupport::write_synthetic_corpus(root, {"noise"}, 2, 11025);
  auto cfg = quick_config();
  const auto clips = discover_corpus(root);
  const auto sweep = run_sweep(clips, cfg, {20, 11025, 50000});
  const auto csv = lines(sweep_csv(sweep));
  CHECK(csv[0] == "class,n_samples,mean_score,std");
  REQUIRE(csv.size() == 3);
  CHECK(csv[1] == "noise,20,0.000000,0.000000");
  CHECK(csv[2].rfind("noise,11025,", 0) == 0);
  CHECK(sweep.warnings.size() >= 3);

  // A sweep at the batch excerpt length reproduces the batch means.
  cfg.duration_s = 11025.0 / 44100.0;
  cfg.baselines = false;
  const auto batch = run_batch(clips, cfg);
  CHECK(sweep.points[1].mean_score == doctest::Approx(batch.classes[0].ours.mean).epsilon(1e-12));
  fs::remove_all(root);
}

TEST_CASE("score_waveform orders the synthetic fixtures") {
  RunConfig cfg;
  cfg.baselines = false;
  const double noise = score_waveform(testsupport::white_noise(0, 44100), cfg).score.normalized_score;
  const double sine = score_waveform(testsupport::noisy_sine(0), cfg).score.normalized_score;
  const double tones = score_waveform(testsupport::tone_sequence(0), cfg).score.normalized_score;
  CHECK(noise < 25.0);
  CHECK(tones > sine);
  CHECK(tones > noise);
}

TEST_CASE("scores do not depend on the input gain") {
  RunConfig cfg;
  cfg.baselines = false;
  cfg.gmm.restarts = 3;
  const auto w = testsupport::tone_sequence(2, 22050);
  auto loud = w;
  for (double& x : loud.samples) x *= 1.75;
  const auto a = score_waveform(w, cfg).score;
  const auto b = score_waveform(loud, cfg).score;
  CHECK(a.k_per_level() == b.k_per_level());
  CHECK(a.normalized_score == doctest::Approx(b.normalized_score).epsilon(1e-9));
}
