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

// Native FLAC stream encoder and decoder.
//
// The encoder emits a standard "fLaC" stream (STREAMINFO + frames) using
// constant, verbatim, fixed-polynomial and quantized-LPC subframes with
// partitioned Rice residual coding. Stereo input is coded as independent
// channels. The decoder accepts any conformant stream, including inter-channel
// decorrelation and escaped Rice partitions; it does not verify MD5.

#include <cstdint>
#include <span>
#include <vector>

#include "mdlscore/audio_io.hpp"

namespace mdlscore::flac {

struct EncoderOptions {
  std::uint32_t block_size = 4096;
  std::uint32_t max_lpc_order = 8;
  std::uint32_t qlp_precision = 12;
  std::uint32_t max_partition_order = 6;
};

/// Identifier written to reports when this encoder produces a baseline value.
inline constexpr const char* kEncoderName = "mdlscore-flac (fixed+lpc, rice)";

/// Encodes interleaved integer samples. `bits_per_sample` in [4, 24].
std::vector<std::uint8_t> encode(std::span<const std::int32_t> interleaved,
                                 std::uint32_t channels,
                                 std::uint32_t bits_per_sample,
                                 std::uint32_t sample_rate,
                                 const EncoderOptions& options = {});

/// Decodes a complete FLAC stream. Integer samples are rescaled to [-1, 1].
DecodedAudio decode(std::span<const std::uint8_t> bytes);

/// Decoded integer samples, interleaved, for bit-exact round-trip checks.
std::vector<std::int32_t> decode_integer(std::span<const std::uint8_t> bytes,
                                         std::uint32_t* channels = nullptr,
                                         std::uint32_t* bits_per_sample = nullptr,
                                         std::uint32_t* sample_rate = nullptr);

}  // namespace mdlscore::flac
