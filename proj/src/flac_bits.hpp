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

// Bit-level I/O and checksums shared by the FLAC encoder and decoder.
// FLAC is big-endian and MSB-first throughout.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mdlscore/error.hpp"

namespace mdlscore::flac::detail {

inline constexpr std::array<std::uint8_t, 256> make_crc8_table() {
  std::array<std::uint8_t, 256> t{};
  for (int i = 0; i < 256; ++i) {
    std::uint8_t c = static_cast<std::uint8_t>(i);
    for (int b = 0; b < 8; ++b) {
      c = static_cast<std::uint8_t>((c & 0x80) ? (c << 1) ^ 0x07 : (c << 1));
    }
    t[i] = c;
  }
  return t;
}

inline constexpr std::array<std::uint16_t, 256> make_crc16_table() {
  std::array<std::uint16_t, 256> t{};
  for (int i = 0; i < 256; ++i) {
    std::uint16_t c = static_cast<std::uint16_t>(i << 8);
    for (int b = 0; b < 8; ++b) {
      c = static_cast<std::uint16_t>((c & 0x8000) ? (c << 1) ^ 0x8005 : (c << 1));
    }
    t[i] = c;
  }
  return t;
}

inline constexpr auto kCrc8Table = make_crc8_table();
inline constexpr auto kCrc16Table = make_crc16_table();

inline std::uint8_t crc8(std::span<const std::uint8_t> bytes) {
  std::uint8_t crc = 0;
  for (std::uint8_t b : bytes) crc = kCrc8Table[crc ^ b];
  return crc;
}

inline std::uint16_t crc16(std::span<const std::uint8_t> bytes) {
  std::uint16_t crc = 0;
  for (std::uint8_t b : bytes) {
    crc = static_cast<std::uint16_t>((crc << 8) ^ kCrc16Table[(crc >> 8) ^ b]);
  }
  return crc;
}

class BitWriter {
 public:
  void write(std::uint64_t value, unsigned bits) {
    for (unsigned i = bits; i-- > 0;) put_bit((value >> i) & 1u);
  }

  void write_signed(std::int64_t value, unsigned bits) {
    const std::uint64_t mask = bits == 64 ? ~0ull : ((1ull << bits) - 1);
    write(static_cast<std::uint64_t>(value) & mask, bits);
  }

  void write_unary_zeros(std::uint32_t zeros) {
    for (std::uint32_t i = 0; i < zeros; ++i) put_bit(0);
    put_bit(1);
  }

  void write_rice(std::int32_t value, unsigned param) {
    const std::uint32_t u = value >= 0 ? static_cast<std::uint32_t>(value) << 1
                                       : (static_cast<std::uint32_t>(-(value + 1)) << 1) | 1u;
    write_unary_zeros(u >> param);
    if (param > 0) write(u & ((1u << param) - 1), param);
  }

  /// The "UTF-8" style variable-length integer used for frame numbers.
  void write_utf8(std::uint64_t v) {
    if (v < 0x80) {
      write(v, 8);
      return;
    }
    int extra = 1;
    while (extra < 6 && v >= (1ull << (5 * extra + 6))) ++extra;
    const unsigned lead_bits = 7 - extra - 1;  // payload bits in the first byte
    const std::uint8_t lead_mask = static_cast<std::uint8_t>(0xFF << (7 - extra));
    write(lead_mask | (v >> (6 * extra) & ((1u << lead_bits) - 1)), 8);
    for (int i = extra - 1; i >= 0; --i) write(0x80 | ((v >> (6 * i)) & 0x3F), 8);
  }

  void align() {
    while (bit_count_ != 0) put_bit(0);
  }

  std::size_t byte_size() const { return bytes_.size(); }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  void put_bit(unsigned bit) {
    current_ = static_cast<std::uint8_t>((current_ << 1) | bit);
    if (++bit_count_ == 8) {
      bytes_.push_back(current_);
      current_ = 0;
      bit_count_ = 0;
    }
  }

  std::vector<std::uint8_t> bytes_;
  std::uint8_t current_ = 0;
  unsigned bit_count_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t read(unsigned bits) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < bits; ++i) v = (v << 1) | read_bit();
    return v;
  }

  std::int64_t read_signed(unsigned bits) {
    if (bits == 0) return 0;
    const std::uint64_t u = read(bits);
    const std::uint64_t sign = 1ull << (bits - 1);
    return static_cast<std::int64_t>(u ^ sign) - static_cast<std::int64_t>(sign);
  }

  std::uint32_t read_unary_zeros() {
    std::uint32_t zeros = 0;
    while (read_bit() == 0) ++zeros;
    return zeros;
  }

  std::int64_t read_rice(unsigned param) {
    const std::uint64_t q = read_unary_zeros();
    const std::uint64_t u = (q << param) | read(param);
    return (u & 1) ? -static_cast<std::int64_t>(u >> 1) - 1
                   : static_cast<std::int64_t>(u >> 1);
  }

  std::uint64_t read_utf8() {
    const auto lead = static_cast<std::uint32_t>(read(8));
    if (!(lead & 0x80)) return lead;
    int extra = 0;
    while (extra < 7 && (lead & (0x40u >> extra))) ++extra;
    if (extra == 0 || extra > 6) corrupt("bad frame number");
    std::uint64_t v = lead & ((1u << (6 - extra)) - 1);
    for (int i = 0; i < extra; ++i) {
      const auto b = static_cast<std::uint32_t>(read(8));
      if ((b & 0xC0) != 0x80) corrupt("bad frame number continuation");
      v = (v << 6) | (b & 0x3F);
    }
    return v;
  }

  void align() {
    bit_pos_ = (bit_pos_ + 7) & ~std::size_t{7};
  }

  std::size_t byte_pos() const { return bit_pos_ / 8; }
  void seek_byte(std::size_t pos) { bit_pos_ = pos * 8; }
  bool at_end() const { return bit_pos_ >= bytes_.size() * 8; }
  std::size_t size() const { return bytes_.size(); }

  [[noreturn]] static void corrupt(const char* what) {
    throw Error(ErrorCode::kUnsupportedFormat, std::string("corrupt FLAC stream: ") + what);
  }

 private:
  unsigned read_bit() {
    if (bit_pos_ >= bytes_.size() * 8) corrupt("unexpected end of data");
    const unsigned bit = (bytes_[bit_pos_ >> 3] >> (7 - (bit_pos_ & 7))) & 1u;
    ++bit_pos_;
    return bit;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t bit_pos_ = 0;
};

}  // namespace mdlscore::flac::detail
