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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "mdlscore/audio_io.hpp"
#include "mdlscore/error.hpp"

namespace mdlscore {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint32_t>(b[pos]) |
         static_cast<std::uint32_t>(b[pos + 1]) << 8 |
         static_cast<std::uint32_t>(b[pos + 2]) << 16 |
         static_cast<std::uint32_t>(b[pos + 3]) << 24;
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint16_t>(b[pos] | b[pos + 1] << 8);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::vector<std::uint8_t> wav_header(std::uint16_t format, std::uint32_t channels,
                                     std::uint32_t rate, std::uint16_t bits,
                                     std::uint32_t data_bytes) {
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, rate);
  put_u32(out, rate * channels * bits / 8);
  put_u16(out, static_cast<std::uint16_t>(channels * bits / 8));
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  return out;
}

}  // namespace

DecodedAudio decode_wav(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 ||
      std::memcmp(b.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE file");
  }
  std::uint16_t format = 0;
  std::uint16_t block_align = 0;
  DecodedAudio out;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint32_t size = read_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    // Truncated final chunks are tolerated for data (common in streamed files).
    const std::size_t avail = std::min<std::size_t>(size, b.size() - body);
    if (std::memcmp(b.data() + pos, "fmt ", 4) == 0) {
      if (avail < 16) throw Error(ErrorCode::kUnsupportedFormat, "short fmt chunk");
      format = read_u16(b, body);
      out.channels = read_u16(b, body + 2);
      out.sample_rate = read_u32(b, body + 4);
      block_align = read_u16(b, body + 12);
      out.bits_per_sample = read_u16(b, body + 14);
      if (format == kFormatExtensible) {
        if (avail < 26) throw Error(ErrorCode::kUnsupportedFormat, "short extensible fmt chunk");
        format = read_u16(b, body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(b.data() + pos, "data", 4) == 0) {
      data = b.subspan(body, avail);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || !have_data) {
    throw Error(ErrorCode::kUnsupportedFormat, "WAV file lacks fmt or data chunk");
  }
  if (out.channels == 0 || out.sample_rate == 0) {
    throw Error(ErrorCode::kUnsupportedFormat, "WAV header has zero channels or rate");
  }
  const std::uint32_t bits = out.bits_per_sample;
  const std::uint32_t bytes_per_sample = (bits + 7) / 8;
  if (block_align != bytes_per_sample * out.channels) {
    throw Error(ErrorCode::kUnsupportedFormat, "inconsistent WAV block alignment");
  }
  const std::size_t count = data.size() / bytes_per_sample / out.channels * out.channels;
  out.interleaved.resize(count);

  if (format == kFormatPcm) {
    if (bits != 8 && bits != 16 && bits != 24 && bits != 32) {
      throw Error(ErrorCode::kUnsupportedFormat,
                  "unsupported PCM bit depth " + std::to_string(bits));
    }
    const double scale = std::ldexp(1.0, -static_cast<int>(bits - 1));
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint8_t* p = data.data() + i * bytes_per_sample;
      std::int64_t v = 0;
      switch (bits) {
        case 8:
          v = static_cast<std::int64_t>(p[0]) - 128;  // unsigned
          break;
        case 16:
          v = static_cast<std::int16_t>(p[0] | p[1] << 8);
          break;
        case 24: {
          std::int32_t u = p[0] | p[1] << 8 | p[2] << 16;
          if (u & 0x800000) u -= 0x1000000;
          v = u;
          break;
        }
        default:
          v = static_cast<std::int32_t>(read_u32(data, i * 4));
      }
      out.interleaved[i] = static_cast<double>(v) * scale;
    }
  } else if (format == kFormatFloat) {
    if (bits == 32) {
      for (std::size_t i = 0; i < count; ++i) {
        float f;
        std::memcpy(&f, data.data() + i * 4, 4);
        out.interleaved[i] = f;
      }
    } else if (bits == 64) {
      for (std::size_t i = 0; i < count; ++i) {
        double d;
        std::memcpy(&d, data.data() + i * 8, 8);
        out.interleaved[i] = d;
      }
    } else {
      throw Error(ErrorCode::kUnsupportedFormat,
                  "unsupported float bit depth " + std::to_string(bits));
    }
  } else {
    throw Error(ErrorCode::kUnsupportedFormat,
                "unsupported WAV codec tag " + std::to_string(format));
  }
  return out;
}

std::vector<std::uint8_t> encode_wav_pcm16(std::span<const double> samples,
                                           std::uint32_t sample_rate,
                                           std::uint32_t channels) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  auto out = wav_header(kFormatPcm, channels, sample_rate, 16, data_bytes);
  for (double s : samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(
        std::clamp(std::lround(c * 32768.0), -32768L, 32767L));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

std::vector<std::uint8_t> encode_wav_float32(std::span<const double> samples,
                                             std::uint32_t sample_rate,
                                             std::uint32_t channels) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 4);
  auto out = wav_header(kFormatFloat, channels, sample_rate, 32, data_bytes);
  for (double s : samples) {
    const auto f = static_cast<float>(s);
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    put_u32(out, u);
  }
  return out;
}

void write_wav_pcm16(const std::filesystem::path& path, const Waveform& w) {
  const auto bytes = encode_wav_pcm16(w.samples, w.sample_rate);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace mdlscore
