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

#include <cmath>
#include <cstring>
#include <string>

#include "flac_bits.hpp"
#include "mdlscore/error.hpp"
#include "mdlscore/flac.hpp"

namespace mdlscore::flac {
namespace {

using detail::BitReader;

struct StreamInfo {
  std::uint32_t sample_rate = 0;
  std::uint32_t channels = 0;
  std::uint32_t bits_per_sample = 0;
  std::uint64_t total_samples = 0;
};

StreamInfo read_metadata(BitReader& in) {
  if (in.size() < 4 || in.read(32) != 0x664C6143) {  // "fLaC"
    throw Error(ErrorCode::kUnsupportedFormat, "missing fLaC marker");
  }
  StreamInfo info;
  bool have_info = false;
  bool last = false;
  while (!last) {
    last = in.read(1) != 0;
    const auto type = static_cast<unsigned>(in.read(7));
    const auto length = static_cast<std::size_t>(in.read(24));
    const std::size_t body = in.byte_pos();
    if (type == 0) {
      in.read(16);
      in.read(16);
      in.read(24);
      in.read(24);
      info.sample_rate = static_cast<std::uint32_t>(in.read(20));
      info.channels = static_cast<std::uint32_t>(in.read(3)) + 1;
      info.bits_per_sample = static_cast<std::uint32_t>(in.read(5)) + 1;
      info.total_samples = in.read(36);
      have_info = true;
    }
    if (body + length > in.size()) BitReader::corrupt("metadata block overruns file");
    in.seek_byte(body + length);
  }
  if (!have_info) BitReader::corrupt("no STREAMINFO block");
  return info;
}

void decode_residual(BitReader& in, std::uint32_t block_size, unsigned order,
                     std::int64_t* out) {
  const auto method = static_cast<unsigned>(in.read(2));
  if (method > 1) BitReader::corrupt("reserved residual coding method");
  const unsigned param_bits = method == 0 ? 4 : 5;
  const unsigned escape = (1u << param_bits) - 1;
  const auto partition_order = static_cast<unsigned>(in.read(4));
  const std::uint32_t partitions = 1u << partition_order;
  if (block_size % partitions != 0 || (block_size >> partition_order) < order) {
    BitReader::corrupt("invalid partition order");
  }
  std::size_t pos = 0;
  for (std::uint32_t p = 0; p < partitions; ++p) {
    const std::size_t len = (block_size >> partition_order) - (p == 0 ? order : 0);
    const auto param = static_cast<unsigned>(in.read(param_bits));
    if (param == escape) {
      const auto raw_bits = static_cast<unsigned>(in.read(5));
      for (std::size_t i = 0; i < len; ++i) out[pos + i] = in.read_signed(raw_bits);
    } else {
      for (std::size_t i = 0; i < len; ++i) out[pos + i] = in.read_rice(param);
    }
    pos += len;
  }
}

void decode_subframe(BitReader& in, std::uint32_t block_size, unsigned bps,
                     std::int64_t* out) {
  if (in.read(1) != 0) BitReader::corrupt("subframe padding bit set");
  const auto type = static_cast<unsigned>(in.read(6));
  unsigned wasted = 0;
  if (in.read(1)) wasted = in.read_unary_zeros() + 1;
  if (wasted >= bps) BitReader::corrupt("wasted bits exceed sample size");
  bps -= wasted;

  if (type == 0) {
    const std::int64_t v = in.read_signed(bps);
    for (std::uint32_t i = 0; i < block_size; ++i) out[i] = v;
  } else if (type == 1) {
    for (std::uint32_t i = 0; i < block_size; ++i) out[i] = in.read_signed(bps);
  } else if (type >= 8 && type <= 12) {
    const unsigned order = type - 8;
    if (order > block_size) BitReader::corrupt("fixed order exceeds block");
    for (unsigned i = 0; i < order; ++i) out[i] = in.read_signed(bps);
    decode_residual(in, block_size, order, out + order);
    for (std::uint32_t i = order; i < block_size; ++i) {
      switch (order) {
        case 1: out[i] += out[i - 1]; break;
        case 2: out[i] += 2 * out[i - 1] - out[i - 2]; break;
        case 3: out[i] += 3 * out[i - 1] - 3 * out[i - 2] + out[i - 3]; break;
        case 4:
          out[i] += 4 * out[i - 1] - 6 * out[i - 2] + 4 * out[i - 3] - out[i - 4];
          break;
        default: break;
      }
    }
  } else if (type >= 32) {
    const unsigned order = type - 31;
    if (order > block_size) BitReader::corrupt("LPC order exceeds block");
    for (unsigned i = 0; i < order; ++i) out[i] = in.read_signed(bps);
    const unsigned precision = static_cast<unsigned>(in.read(4)) + 1;
    if (precision == 16) BitReader::corrupt("invalid LPC precision");
    const auto shift = static_cast<int>(in.read_signed(5));
    if (shift < 0) BitReader::corrupt("negative LPC shift");
    std::int64_t coeffs[32];
    for (unsigned j = 0; j < order; ++j) coeffs[j] = in.read_signed(precision);
    decode_residual(in, block_size, order, out + order);
    for (std::uint32_t i = order; i < block_size; ++i) {
      std::int64_t sum = 0;
      for (unsigned j = 0; j < order; ++j) sum += coeffs[j] * out[i - 1 - j];
      out[i] += sum >> shift;
    }
  } else {
    BitReader::corrupt("reserved subframe type");
  }
  if (wasted) {
    for (std::uint32_t i = 0; i < block_size; ++i) out[i] <<= wasted;
  }
}

std::uint32_t frame_block_size(BitReader& in, unsigned code) {
  switch (code) {
    case 0: BitReader::corrupt("reserved block size");
    case 1: return 192;
    case 6: return static_cast<std::uint32_t>(in.read(8)) + 1;
    case 7: return static_cast<std::uint32_t>(in.read(16)) + 1;
    default:
      if (code <= 5) return 576u << (code - 2);
      return 256u << (code - 8);
  }
}

std::uint32_t frame_sample_rate(BitReader& in, unsigned code, std::uint32_t fallback) {
  static constexpr std::uint32_t kRates[] = {0,     88200, 176400, 192000, 8000, 16000,
                                             22050, 24000, 32000,  44100,  48000, 96000};
  if (code == 0) return fallback;
  if (code < 12) return kRates[code];
  if (code == 12) return static_cast<std::uint32_t>(in.read(8)) * 1000;
  if (code == 13) return static_cast<std::uint32_t>(in.read(16));
  if (code == 14) return static_cast<std::uint32_t>(in.read(16)) * 10;
  BitReader::corrupt("invalid sample rate code");
}

unsigned frame_sample_size(unsigned code, unsigned fallback) {
  switch (code) {
    case 0: return fallback;
    case 1: return 8;
    case 2: return 12;
    case 4: return 16;
    case 5: return 20;
    case 6: return 24;
    case 7: return 32;
    default: BitReader::corrupt("reserved sample size");
  }
}

}  // namespace

std::vector<std::int32_t> decode_integer(std::span<const std::uint8_t> bytes,
                                         std::uint32_t* channels_out,
                                         std::uint32_t* bps_out,
                                         std::uint32_t* rate_out) {
  BitReader in(bytes);
  const StreamInfo info = read_metadata(in);
  std::vector<std::int32_t> out;
  if (info.total_samples > 0) out.reserve(info.total_samples * info.channels);
  std::vector<std::int64_t> buf;

  while (in.byte_pos() + 2 <= in.size()) {
    const std::size_t frame_begin = in.byte_pos();
    const auto sync = in.read(16);
    if ((sync & 0xFFFE) != 0xFFF8) BitReader::corrupt("lost frame sync");
    const auto bs_code = static_cast<unsigned>(in.read(4));
    const auto rate_code = static_cast<unsigned>(in.read(4));
    const auto assignment = static_cast<unsigned>(in.read(4));
    const auto size_code = static_cast<unsigned>(in.read(3));
    in.read(1);
    in.read_utf8();
    const std::uint32_t block_size = frame_block_size(in, bs_code);
    frame_sample_rate(in, rate_code, info.sample_rate);
    const unsigned bps = frame_sample_size(size_code, info.bits_per_sample);
    const std::size_t header_end = in.byte_pos();
    const auto crc = static_cast<std::uint8_t>(in.read(8));
    if (crc != detail::crc8(bytes.subspan(frame_begin, header_end - frame_begin))) {
      BitReader::corrupt("frame header CRC mismatch");
    }

    unsigned channels;
    if (assignment < 8) {
      channels = assignment + 1;
    } else if (assignment <= 10) {
      channels = 2;
    } else {
      BitReader::corrupt("reserved channel assignment");
    }
    if (channels != info.channels) BitReader::corrupt("channel count changed mid-stream");

    buf.assign(static_cast<std::size_t>(block_size) * channels, 0);
    for (unsigned ch = 0; ch < channels; ++ch) {
      // The side channel carries one extra bit.
      unsigned ch_bps = bps;
      if ((assignment == 8 && ch == 1) || (assignment == 9 && ch == 0) ||
          (assignment == 10 && ch == 1)) {
        ++ch_bps;
      }
      decode_subframe(in, block_size, ch_bps, buf.data() + ch * block_size);
    }
    in.align();
    const std::size_t body_end = in.byte_pos();
    const auto crc16 = static_cast<std::uint16_t>(in.read(16));
    if (crc16 != detail::crc16(bytes.subspan(frame_begin, body_end - frame_begin))) {
      BitReader::corrupt("frame CRC mismatch");
    }

    std::int64_t* a = buf.data();
    std::int64_t* b = buf.data() + block_size;
    for (std::uint32_t i = 0; i < block_size; ++i) {
      if (assignment == 8) {  // left/side
        b[i] = a[i] - b[i];
      } else if (assignment == 9) {  // side/right
        a[i] = a[i] + b[i];
      } else if (assignment == 10) {  // mid/side
        const std::int64_t side = b[i];
        const std::int64_t mid = (a[i] << 1) | (side & 1);
        a[i] = (mid + side) >> 1;
        b[i] = (mid - side) >> 1;
      }
      for (unsigned ch = 0; ch < channels; ++ch) {
        out.push_back(static_cast<std::int32_t>(buf[ch * block_size + i]));
      }
    }
  }
  if (channels_out) *channels_out = info.channels;
  if (bps_out) *bps_out = info.bits_per_sample;
  if (rate_out) *rate_out = info.sample_rate;
  return out;
}

DecodedAudio decode(std::span<const std::uint8_t> bytes) {
  DecodedAudio audio;
  const auto ints = decode_integer(bytes, &audio.channels, &audio.bits_per_sample,
                                   &audio.sample_rate);
  if (audio.sample_rate == 0) {
    throw Error(ErrorCode::kUnsupportedFormat, "FLAC stream has no sample rate");
  }
  const double scale = std::ldexp(1.0, -static_cast<int>(audio.bits_per_sample - 1));
  audio.interleaved.reserve(ints.size());
  for (std::int32_t v : ints) audio.interleaved.push_back(v * scale);
  return audio;
}

}  // namespace mdlscore::flac
