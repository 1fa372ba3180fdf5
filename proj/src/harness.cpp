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

#include "mdlscore/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "mdlscore/error.hpp"
#include "mdlscore/flac.hpp"

namespace mdlscore {
namespace {

constexpr std::uint32_t kReferenceRate = 44100;

class Logger {
 public:
  explicit Logger(const LogSink& sink) : sink_(sink) {}

  void operator()(const std::string& message) {
    if (!sink_) return;
    std::lock_guard lock(mutex_);
    sink_(message);
  }

 private:
  const LogSink& sink_;
  std::mutex mutex_;
};

template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string canonical_key(std::string_view key) {
  std::string k = trim(key);
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  std::replace(k.begin(), k.end(), '_', '-');
  std::transform(k.begin(), k.end(), k.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return k;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kInvalidArgument,
              "invalid value '" + std::string(value) + "' for " + std::string(key));
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) bad_value(key, text);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, text);
  }
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad_value(key, text);
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad_value(key, text);
}

bool is_audio_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".wav" || ext == ".flac";
}

std::vector<std::filesystem::path> audio_files_in(const std::filesystem::path& dir,
                                                  bool recursive) {
  std::vector<std::filesystem::path> files;
  auto consider = [&](const std::filesystem::directory_entry& e) {
    if (e.is_regular_file() && is_audio_file(e.path())) files.push_back(e.path());
  };
  if (recursive) {
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) consider(e);
  } else {
    for (const auto& e : std::filesystem::directory_iterator(dir)) consider(e);
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string format_number(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::string> class_order(const std::vector<ClipSpec>& clips) {
  std::vector<std::string> order;
  for (const auto& c : clips) {
    if (std::find(order.begin(), order.end(), c.class_name) == order.end()) {
      order.push_back(c.class_name);
    }
  }
  return order;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(duration_s > 0.0)) fail("duration must be positive");
  if (!(offset_s >= 0.0)) fail("offset must be non-negative");
  if (k_max < 1) fail("kmax must be at least 1");
  if (precision_bits < 1) fail("precision must be at least 1");
  if (levels < 1 || levels > kMaxLevels) fail("levels must be 1, 2 or 3");
  if (fixed_k && *fixed_k < 1) fail("fixed K must be at least 1");
  if (!(target_mean_abs > 0.0)) fail("target amplitude must be positive");
  if (!(sample_scale > 0.0) || !std::isfinite(sample_scale)) {
    fail("sample scale must be positive and finite");
  }
  if (workers < 1) fail("workers must be at least 1");
  if (spectrogram.window < 2 || spectrogram.overlap >= spectrogram.window) {
    fail("need window >= 2 and overlap < window");
  }
  if (gmm.restarts < 1 || gmm.max_iter < 1 || !(gmm.tol >= 0.0)) {
    fail("EM needs restarts >= 1, max-iter >= 1 and tol >= 0");
  }
}

MultilevelOptions RunConfig::multilevel_options() const {
  MultilevelOptions o;
  o.selection.k_max = k_max;
  o.selection.coding.precision_bits = precision_bits;
  o.selection.coding.floor_code_lengths = floor_code_lengths;
  o.selection.gmm = gmm;
  o.selection.include_model_cost = include_model_cost;
  o.levels = levels;
  o.fixed_k = fixed_k;
  o.level3_from_level1 = level3_from_level1;
  return o;
}

void set_config_value(RunConfig& c, std::string_view raw_key, std::string_view value) {
  const std::string key = canonical_key(raw_key);
  if (key == "seconds" || key == "duration") {
    c.duration_s = parse_double(key, value);
  } else if (key == "offset") {
    c.offset_s = parse_double(key, value);
  } else if (key == "seed") {
    c.seed = parse_uint(key, value);
  } else if (key == "kmax") {
    c.k_max = parse_uint(key, value);
  } else if (key == "precision") {
    c.precision_bits = static_cast<int>(parse_uint(key, value));
  } else if (key == "levels") {
    c.levels = static_cast<int>(parse_uint(key, value));
  } else if (key == "fixed-k") {
    const std::string v = trim(value);
    if (v.empty() || v == "none" || v == "0") {
      c.fixed_k.reset();
    } else {
      c.fixed_k = parse_uint(key, value);
    }
  } else if (key == "target-amp") {
    c.target_mean_abs = parse_double(key, value);
  } else if (key == "sample-scale") {
    c.sample_scale = parse_double(key, value);
  } else if (key == "no-baselines") {
    c.baselines = !parse_bool(key, value);
  } else if (key == "baselines") {
    c.baselines = parse_bool(key, value);
  } else if (key == "workers") {
    c.workers = parse_uint(key, value);
  } else if (key == "window") {
    c.spectrogram.window = parse_uint(key, value);
  } else if (key == "overlap") {
    c.spectrogram.overlap = parse_uint(key, value);
  } else if (key == "log-magnitude") {
    c.spectrogram.log_magnitude = parse_bool(key, value);
  } else if (key == "tol") {
    c.gmm.tol = parse_double(key, value);
  } else if (key == "max-iter") {
    c.gmm.max_iter = parse_uint(key, value);
  } else if (key == "restarts") {
    c.gmm.restarts = parse_uint(key, value);
  } else if (key == "floor-code-lengths") {
    c.floor_code_lengths = parse_bool(key, value);
  } else if (key == "model-cost-in-selection") {
    c.include_model_cost = parse_bool(key, value);
  } else if (key == "level3-from-level1") {
    c.level3_from_level1 = parse_bool(key, value);
  } else if (key == "channel-policy") {
    const std::string v = trim(value);
    if (v == "average") {
      c.channel_policy = ChannelPolicy::kAverage;
    } else if (v == "first") {
      c.channel_policy = ChannelPolicy::kFirst;
    } else {
      bad_value(key, value);
    }
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown configuration key '" + key + "'");
  }
}

std::vector<ClipSpec> discover_corpus(const std::filesystem::path& source) {
  namespace fs = std::filesystem;
  std::vector<ClipSpec> clips;
  if (fs::is_directory(source)) {
    std::string root_class = fs::absolute(source).lexically_normal().filename().string();
    if (root_class.empty()) {
      root_class = fs::absolute(source).lexically_normal().parent_path().filename().string();
    }
    for (const auto& f : audio_files_in(source, false)) clips.push_back({f, root_class, {}});
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(source)) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      for (const auto& f : audio_files_in(d, true)) {
        clips.push_back({f, d.filename().string(), {}});
      }
    }
    return clips;
  }
  if (!fs::is_regular_file(source)) {
    throw Error(ErrorCode::kIo, "no such corpus directory or manifest: " + source.string());
  }
  std::ifstream in(source);
  if (!in) throw Error(ErrorCode::kIo, "cannot read manifest " + source.string());
  const fs::path base = source.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  source.string() + ":" + std::to_string(line_no) +
                      ": expected 'path,class[,offset]'");
    }
    ClipSpec clip;
    clip.path = fields[0];
    if (clip.path.is_relative()) clip.path = base / clip.path;
    clip.class_name = fields[1];
    if (fields.size() == 3 && !fields[2].empty()) {
      clip.offset_s = parse_double("offset", fields[2]);
    }
    clips.push_back(std::move(clip));
  }
  return clips;
}

ClipScore score_waveform(const Waveform& excerpt, const RunConfig& config) {
  const Waveform w = normalize_amplitude(excerpt, config.target_mean_abs);
  Waveform scaled = w;
  for (double& x : scaled.samples) x *= config.sample_scale;
  auto stage = std::chrono::steady_clock::now();
  const auto lap = [&](const char* name) {
    if (!config.log) return;
    config.log("  " + std::string(name) + ": " + format_number(seconds_since(stage), 3) + " s");
    stage = std::chrono::steady_clock::now();
  };
  const FrameMatrix frames = spectrogram_frames(scaled, config.spectrogram);
  lap("spectrogram");
  ClipScore out;
  out.score = multilevel_score(frames, config.seed, config.multilevel_options());
  lap("clustering");
  if (config.baselines) {
    out.baselines = compute_baselines(w, frames);
    lap("baselines");
  }
  return out;
}

ClipScore score_clip(const std::filesystem::path& path, const RunConfig& config,
                     std::optional<double> offset_s) {
  config.validate();
  const Waveform full = load_waveform(path, config.channel_policy);
  if (full.sample_rate != kReferenceRate && config.log) {
    config.log("warning: " + path.string() + " is sampled at " +
               std::to_string(full.sample_rate) + " Hz, not " +
               std::to_string(kReferenceRate) + " Hz; frame counts differ");
  }
  const Waveform excerpt =
      extract_excerpt(full, offset_s.value_or(config.offset_s), config.duration_s);
  return score_waveform(excerpt, config);
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

BatchResult run_batch(const std::vector<ClipSpec>& clips, const RunConfig& config) {
  config.validate();
  if (clips.empty()) throw Error(ErrorCode::kInvalidArgument, "no audio clips to score");
  Logger log(config.log);
  BatchResult result;
  result.baselines = config.baselines;
  result.lossless_codec = flac::kEncoderName;
  result.clips.resize(clips.size());
  std::atomic<std::size_t> done{0};

  parallel_for(clips.size(), config.workers, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    ClipResult& r = result.clips[i];
    r.clip = clips[i];
    try {
      RunConfig local = config;
      local.log = [&log](const std::string& m) { log(m); };
      r.result = score_clip(clips[i].path, local, clips[i].offset_s);
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    const std::size_t finished = ++done;
    log("[" + std::to_string(finished) + "/" + std::to_string(clips.size()) + "] " +
        clips[i].path.string() + ": " +
        (r.ok ? "score " + format_number(r.result.score.normalized_score, 2)
              : "FAILED (" + r.error + ")") +
        " in " + format_number(seconds_since(start), 2) + " s");
  });

  std::stable_sort(result.clips.begin(), result.clips.end(),
                   [](const ClipResult& a, const ClipResult& b) {
                     return a.clip.path < b.clip.path;
                   });

  for (const auto& r : result.clips) {
    if (!r.ok) {
      ++result.failures;
      result.warnings.push_back(r.clip.path.string() + ": " + r.error);
    }
  }
  for (const auto& name : class_order(clips)) {
    std::vector<double> ours, katz, entropy, lz, audio;
    for (const auto& r : result.clips) {
      if (!r.ok || r.clip.class_name != name) continue;
      ours.push_back(r.result.score.normalized_score);
      if (r.result.baselines) {
        katz.push_back(r.result.baselines->katz_fd);
        entropy.push_back(r.result.baselines->spectrogram_entropy);
        lz.push_back(r.result.baselines->lz_spectrogram_ratio);
        audio.push_back(r.result.baselines->lossless_audio_ratio);
      }
    }
    if (ours.empty()) {
      result.warnings.push_back("class '" + name + "' has no scored clips; excluded");
      log("warning: " + result.warnings.back());
      continue;
    }
    ClassSummary s;
    s.class_name = name;
    s.count = ours.size();
    s.ours = summarize(ours);
    s.katz = summarize(katz);
    s.entropy = summarize(entropy);
    s.lz_ratio = summarize(lz);
    s.audio_ratio = summarize(audio);
    result.classes.push_back(std::move(s));
  }
  return result;
}

std::string batch_csv(const BatchResult& result) {
  std::string out = "class,count,ours_mean,ours_std";
  if (result.baselines) {
    out +=
        ",katz_mean,katz_std,entropy_mean,entropy_std,lz_ratio_mean,lz_ratio_std,"
        "audio_ratio_mean,audio_ratio_std";
  }
  out += "\n";
  for (const auto& c : result.classes) {
    out += csv_field(c.class_name) + "," + std::to_string(c.count) + "," +
           format_number(c.ours.mean) + "," + format_number(c.ours.std);
    if (result.baselines) {
      for (const MetricSummary* m : {&c.katz, &c.entropy, &c.lz_ratio, &c.audio_ratio}) {
        out += "," + format_number(m->mean) + "," + format_number(m->std);
      }
    }
    out += "\n";
  }
  return out;
}

std::string batch_clips_csv(const BatchResult& result) {
  std::string out = "path,class,status,ours,raw_bits,k1,k2,k3";
  if (result.baselines) out += ",katz,entropy,lz_ratio,audio_ratio";
  out += ",error\n";
  for (const auto& r : result.clips) {
    out += csv_field(r.clip.path.string()) + "," + csv_field(r.clip.class_name) + "," +
           (r.ok ? "ok" : "error");
    const auto& card = r.result.score;
    out += "," + (r.ok ? format_number(card.normalized_score) : "");
    out += "," + (r.ok ? format_number(card.raw_bits_total) : "");
    for (int l = 0; l < kMaxLevels; ++l) {
      out += ",";
      if (r.ok && l < static_cast<int>(card.levels.size()) && !card.levels[l].skipped) {
        out += std::to_string(card.levels[l].k);
      }
    }
    if (result.baselines) {
      const auto& b = r.result.baselines;
      for (double v : {b ? b->katz_fd : 0.0, b ? b->spectrogram_entropy : 0.0,
                       b ? b->lz_spectrogram_ratio : 0.0, b ? b->lossless_audio_ratio : 0.0}) {
        out += "," + (b ? format_number(v) : "");
      }
    }
    out += "," + csv_field(r.error) + "\n";
  }
  return out;
}

std::string batch_table(const BatchResult& result) {
  auto cell = [](const MetricSummary& m) {
    return format_number(m.mean, 1) + " (" + format_number(m.std, 2) + ")";
  };
  std::vector<std::string> header = {"class", "n", "ours"};
  if (result.baselines) {
    header.insert(header.end(), {"katz", "ent", "zl comp ratio", "wav comp ratio"});
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : result.classes) {
    std::vector<std::string> row = {c.class_name, std::to_string(c.count), cell(c.ours)};
    if (result.baselines) {
      row.insert(row.end(),
                 {cell(c.katz), cell(c.entropy), cell(c.lz_ratio), cell(c.audio_ratio)});
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    width[i] = header[i].size();
    for (const auto& r : rows) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << (i ? "  " : "") << r[i] << std::string(width[i] - r[i].size(), ' ');
    }
    out << "\n";
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << "\n";
  for (const auto& r : rows) emit(r);
  if (result.baselines) out << "lossless audio codec: " << result.lossless_codec << "\n";
  if (result.failures) out << result.failures << " clip(s) failed\n";
  return out.str();
}

SweepResult run_sweep(const std::vector<ClipSpec>& clips, const RunConfig& config,
                      const std::vector<std::size_t>& counts) {
  config.validate();
  if (clips.empty()) throw Error(ErrorCode::kInvalidArgument, "no audio clips to score");
  if (counts.empty()) throw Error(ErrorCode::kInvalidArgument, "no sample counts given");
  Logger log(config.log);
  RunConfig local = config;
  local.baselines = false;
  local.log = nullptr;

  struct Cell {
    bool present = false;
    double score = 0.0;
  };
  // cells[clip][count]
  std::vector<std::vector<Cell>> cells(clips.size(), std::vector<Cell>(counts.size()));
  std::vector<std::vector<std::string>> notes(clips.size());
  std::vector<char> failed(clips.size(), 0);

  parallel_for(clips.size(), config.workers, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const ClipSpec& clip = clips[i];
    Waveform full;
    try {
      full = load_waveform(clip.path, config.channel_policy);
    } catch (const std::exception& e) {
      failed[i] = 1;
      notes[i].push_back(clip.path.string() + ": " + e.what());
      return;
    }
    const double offset_s = clip.offset_s.value_or(config.offset_s);
    const auto offset = static_cast<std::size_t>(std::llround(offset_s * full.sample_rate));
    for (std::size_t c = 0; c < counts.size(); ++c) {
      const std::size_t count = counts[c];
      const std::string where = clip.path.string() + " @" + std::to_string(count);
      if (offset > full.samples.size() || count > full.samples.size() - offset) {
        notes[i].push_back(where + ": exceeds clip length; skipped");
        continue;
      }
      if (spectrogram_frame_count(count, config.spectrogram) < 2) {
        notes[i].push_back(where + ": too few samples for two frames; scored 0");
        cells[i][c] = {true, 0.0};
        continue;
      }
      try {
        const Waveform excerpt = extract_samples(full, offset, count);
        cells[i][c] = {true, score_waveform(excerpt, local).score.normalized_score};
      } catch (const std::exception& e) {
        failed[i] = 1;
        notes[i].push_back(where + ": " + e.what());
      }
    }
    log("swept " + clip.path.string() + " in " + format_number(seconds_since(start), 2) +
        " s");
  });

  SweepResult result;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (failed[i]) ++result.failures;
  }
  // Notes in path order keep the warning list deterministic.
  std::vector<std::size_t> by_path(clips.size());
  for (std::size_t i = 0; i < by_path.size(); ++i) by_path[i] = i;
  std::stable_sort(by_path.begin(), by_path.end(), [&](std::size_t a, std::size_t b) {
    return clips[a].path < clips[b].path;
  });
  for (std::size_t i : by_path) {
    for (auto& n : notes[i]) {
      log("warning: " + n);
      result.warnings.push_back(std::move(n));
    }
  }
  for (const auto& name : class_order(clips)) {
    for (std::size_t c = 0; c < counts.size(); ++c) {
      std::vector<double> scores;
      for (std::size_t i : by_path) {
        if (clips[i].class_name == name && cells[i][c].present) {
          scores.push_back(cells[i][c].score);
        }
      }
      if (scores.empty()) {
        result.warnings.push_back("class '" + name + "' has no clips at " +
                                  std::to_string(counts[c]) + " samples; row omitted");
        log("warning: " + result.warnings.back());
        continue;
      }
      const MetricSummary s = summarize(scores);
      result.points.push_back({name, counts[c], s.mean, s.std, scores.size()});
    }
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "class,n_samples,mean_score,std\n";
  for (const auto& p : result.points) {
    out += csv_field(p.class_name) + "," + std::to_string(p.n_samples) + "," +
           format_number(p.mean_score) + "," + format_number(p.std) + "\n";
  }
  return out;
}

}  // namespace mdlscore
