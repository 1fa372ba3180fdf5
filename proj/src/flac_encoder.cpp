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
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "flac_bits.hpp"
#include "mdlscore/error.hpp"
#include "mdlscore/flac.hpp"

namespace mdlscore::flac {
namespace {

using detail::BitWriter;

constexpr unsigned kMaxFixedOrder = 4;
constexpr unsigned kMaxRiceParam = 30;  // Rice2 escape is 31

struct ResidualCoding {
  unsigned partition_order = 0;
  std::vector<unsigned> params;  // one per partition
  bool rice2 = false;
  std::uint64_t bits = std::numeric_limits<std::uint64_t>::max();
};

struct Subframe {
  enum class Kind { kConstant, kVerbatim, kFixed, kLpc } kind = Kind::kVerbatim;
  unsigned order = 0;
  unsigned precision = 0;
  int shift = 0;
  std::vector<std::int32_t> coefficients;
  std::vector<std::int32_t> residual;
  ResidualCoding coding;
  std::uint64_t bits = std::numeric_limits<std::uint64_t>::max();
};

std::uint32_t zigzag(std::int32_t v) {
  return v >= 0 ? static_cast<std::uint32_t>(v) << 1
                : (static_cast<std::uint32_t>(-(v + 1)) << 1) | 1u;
}

std::uint64_t rice_bits(std::span<const std::uint32_t> folded, unsigned param) {
  std::uint64_t bits = static_cast<std::uint64_t>(folded.size()) * (param + 1);
  for (std::uint32_t u : folded) bits += u >> param;
  return bits;
}

// Exact cost of the best Rice parameter near the mean-based estimate.
std::pair<unsigned, std::uint64_t> best_rice_param(
    std::span<const std::uint32_t> folded) {
  if (folded.empty()) return {0, 0};
  std::uint64_t sum = 0;
  for (std::uint32_t u : folded) sum += u;
  const std::uint64_t mean = sum / folded.size();
  const unsigned guess =
      mean == 0 ? 0 : static_cast<unsigned>(std::bit_width(mean) - 1);
  unsigned best = 0;
  std::uint64_t best_bits = std::numeric_limits<std::uint64_t>::max();
  const unsigned lo = guess > 1 ? guess - 1 : 0;
  const unsigned hi = std::min(guess + 1, kMaxRiceParam);
  for (unsigned p = lo; p <= hi; ++p) {
    const std::uint64_t b = rice_bits(folded, p);
    if (b < best_bits) {
      best_bits = b;
      best = p;
    }
  }
  return {best, best_bits};
}

ResidualCoding code_residual(std::span<const std::int32_t> residual,
                             std::uint32_t block_size, unsigned predictor_order,
                             unsigned max_partition_order) {
  std::vector<std::uint32_t> folded(residual.size());
  std::transform(residual.begin(), residual.end(), folded.begin(), zigzag);

  ResidualCoding best;
  for (unsigned order = 0; order <= max_partition_order; ++order) {
    if (order > 0 && (block_size % (1u << order) != 0)) break;
    const std::uint32_t part_len = block_size >> order;
    if (part_len <= predictor_order) break;
    ResidualCoding candidate;
    candidate.partition_order = order;
    candidate.bits = 2 + 4;  // coding method + partition order
    std::size_t pos = 0;
    for (std::uint32_t p = 0; p < (1u << order); ++p) {
      const std::size_t len = p == 0 ? part_len - predictor_order : part_len;
      const auto [param, bits] =
          best_rice_param(std::span(folded).subspan(pos, len));
      candidate.params.push_back(param);
      if (param > 14) candidate.rice2 = true;
      candidate.bits += bits;
      pos += len;
    }
    candidate.bits += candidate.params.size() * (candidate.rice2 ? 5u : 4u);
    if (candidate.bits < best.bits) best = std::move(candidate);
  }
  return best;
}

std::optional<std::vector<std::int32_t>> fixed_residual(
    std::span<const std::int32_t> x, unsigned order) {
  std::vector<std::int32_t> r(x.size() - order);
  for (std::size_t i = order; i < x.size(); ++i) {
    std::int64_t e = x[i];
    switch (order) {
      case 1: e = static_cast<std::int64_t>(x[i]) - x[i - 1]; break;
      case 2: e = static_cast<std::int64_t>(x[i]) - 2ll * x[i - 1] + x[i - 2]; break;
      case 3:
        e = static_cast<std::int64_t>(x[i]) - 3ll * x[i - 1] + 3ll * x[i - 2] - x[i - 3];
        break;
      case 4:
        e = static_cast<std::int64_t>(x[i]) - 4ll * x[i - 1] + 6ll * x[i - 2] -
            4ll * x[i - 3] + x[i - 4];
        break;
      default: break;
    }
    if (e > (1ll << 30) || e < -(1ll << 30)) return std::nullopt;
    r[i - order] = static_cast<std::int32_t>(e);
  }
  return r;
}

// Levinson-Durbin on a Tukey(0.5)-windowed autocorrelation. Returns the
// predictor coefficients for every order 1..max_order.
std::vector<std::vector<double>> lpc_coefficients(std::span<const std::int32_t> x,
                                                  unsigned max_order) {
  const std::size_t n = x.size();
  std::vector<double> w(n);
  const double alpha = 0.5;
  const double taper = alpha * static_cast<double>(n - 1) / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    double g = 1.0;
    const double di = static_cast<double>(i);
    const double dn = static_cast<double>(n - 1);
    if (taper > 0 && di < taper) {
      g = 0.5 * (1.0 - std::cos(std::numbers::pi * di / taper));
    } else if (taper > 0 && di > dn - taper) {
      g = 0.5 * (1.0 - std::cos(std::numbers::pi * (dn - di) / taper));
    }
    w[i] = x[i] * g;
  }
  std::vector<double> autoc(max_order + 1, 0.0);
  for (unsigned lag = 0; lag <= max_order; ++lag) {
    double s = 0.0;
    for (std::size_t i = lag; i < n; ++i) s += w[i] * w[i - lag];
    autoc[lag] = s;
  }
  std::vector<std::vector<double>> result;
  if (autoc[0] <= 0.0) return result;

  std::vector<double> lpc(max_order, 0.0);
  double err = autoc[0];
  for (unsigned i = 0; i < max_order; ++i) {
    double r = -autoc[i + 1];
    for (unsigned j = 0; j < i; ++j) r -= lpc[j] * autoc[i - j];
    r /= err;
    lpc[i] = r;
    for (unsigned j = 0; j < i / 2; ++j) {
      const double tmp = lpc[j];
      lpc[j] += r * lpc[i - 1 - j];
      lpc[i - 1 - j] += r * tmp;
    }
    if (i & 1) lpc[i / 2] += lpc[i / 2] * r;
    err *= (1.0 - r * r);
    // Predictor convention: x[t] ~ sum_j c[j] x[t-1-j], c = -lpc.
    std::vector<double> c(i + 1);
    for (unsigned j = 0; j <= i; ++j) c[j] = -lpc[j];
    result.push_back(std::move(c));
    if (err <= 0.0) break;
  }
  return result;
}

std::optional<Subframe> lpc_subframe(std::span<const std::int32_t> x,
                                     std::span<const double> coeffs,
                                     unsigned precision, std::uint32_t block_size,
                                     unsigned bits_per_sample,
                                     unsigned max_partition_order) {
  const unsigned order = static_cast<unsigned>(coeffs.size());
  double cmax = 0.0;
  for (double c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (cmax <= 0.0 || !std::isfinite(cmax)) return std::nullopt;
  int log2cmax = 0;
  std::frexp(cmax, &log2cmax);
  int shift = static_cast<int>(precision) - 1 - log2cmax;
  if (shift < 0) return std::nullopt;
  shift = std::min(shift, 15);

  const std::int32_t qmax = (1 << (precision - 1)) - 1;
  const std::int32_t qmin = -(1 << (precision - 1));
  Subframe sf;
  sf.kind = Subframe::Kind::kLpc;
  sf.order = order;
  sf.precision = precision;
  sf.shift = shift;
  double carry = 0.0;
  for (double c : coeffs) {
    carry += c * std::ldexp(1.0, shift);
    const auto q = static_cast<std::int32_t>(
        std::clamp<long>(std::lround(carry), qmin, qmax));
    carry -= q;
    sf.coefficients.push_back(q);
  }

  sf.residual.resize(x.size() - order);
  for (std::size_t i = order; i < x.size(); ++i) {
    std::int64_t sum = 0;
    for (unsigned j = 0; j < order; ++j) {
      sum += static_cast<std::int64_t>(sf.coefficients[j]) * x[i - 1 - j];
    }
    const std::int64_t e = x[i] - (sum >> shift);
    if (e > (1ll << 30) || e < -(1ll << 30)) return std::nullopt;
    sf.residual[i - order] = static_cast<std::int32_t>(e);
  }
  sf.coding = code_residual(sf.residual, block_size, order, max_partition_order);
  sf.bits = 8 + static_cast<std::uint64_t>(order) * bits_per_sample + 4 + 5 +
            static_cast<std::uint64_t>(order) * precision + sf.coding.bits;
  return sf;
}

Subframe choose_subframe(std::span<const std::int32_t> x, unsigned bps,
                         const EncoderOptions& opt) {
  const auto block_size = static_cast<std::uint32_t>(x.size());
  if (std::all_of(x.begin(), x.end(), [&](std::int32_t v) { return v == x[0]; })) {
    Subframe sf;
    sf.kind = Subframe::Kind::kConstant;
    sf.bits = 8 + bps;
    return sf;
  }
  Subframe best;
  best.kind = Subframe::Kind::kVerbatim;
  best.bits = 8 + static_cast<std::uint64_t>(bps) * block_size;

  for (unsigned order = 0; order <= kMaxFixedOrder && order < block_size; ++order) {
    auto residual = fixed_residual(x, order);
    if (!residual) continue;
    Subframe sf;
    sf.kind = Subframe::Kind::kFixed;
    sf.order = order;
    sf.coding = code_residual(*residual, block_size, order, opt.max_partition_order);
    sf.bits = 8 + static_cast<std::uint64_t>(order) * bps + sf.coding.bits;
    sf.residual = std::move(*residual);
    if (sf.bits < best.bits) best = std::move(sf);
  }

  const unsigned max_lpc = std::min<unsigned>(opt.max_lpc_order, 32);
  if (max_lpc > 0 && block_size > max_lpc) {
    for (const auto& coeffs : lpc_coefficients(x, max_lpc)) {
      auto sf = lpc_subframe(x, coeffs, opt.qlp_precision, block_size, bps,
                             opt.max_partition_order);
      if (sf && sf->bits < best.bits) best = std::move(*sf);
    }
  }
  return best;
}

void write_residual(BitWriter& out, const Subframe& sf, std::uint32_t block_size) {
  const ResidualCoding& rc = sf.coding;
  const unsigned param_bits = rc.rice2 ? 5 : 4;
  out.write(rc.rice2 ? 1 : 0, 2);
  out.write(rc.partition_order, 4);
  const std::uint32_t part_len = block_size >> rc.partition_order;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < rc.params.size(); ++p) {
    const std::size_t len = p == 0 ? part_len - sf.order : part_len;
    out.write(rc.params[p], param_bits);
    for (std::size_t i = 0; i < len; ++i) out.write_rice(sf.residual[pos + i], rc.params[p]);
    pos += len;
  }
}

void write_subframe(BitWriter& out, const Subframe& sf,
                    std::span<const std::int32_t> x, unsigned bps) {
  switch (sf.kind) {
    case Subframe::Kind::kConstant:
      out.write(0, 8);
      out.write_signed(x[0], bps);
      return;
    case Subframe::Kind::kVerbatim:
      out.write(0b00000010, 8);
      for (std::int32_t v : x) out.write_signed(v, bps);
      return;
    case Subframe::Kind::kFixed:
      out.write((0b001000u | sf.order) << 1, 8);
      for (unsigned i = 0; i < sf.order; ++i) out.write_signed(x[i], bps);
      write_residual(out, sf, static_cast<std::uint32_t>(x.size()));
      return;
    case Subframe::Kind::kLpc:
      out.write((0b100000u | (sf.order - 1)) << 1, 8);
      for (unsigned i = 0; i < sf.order; ++i) out.write_signed(x[i], bps);
      out.write(sf.precision - 1, 4);
      out.write_signed(sf.shift, 5);
      for (std::int32_t c : sf.coefficients) out.write_signed(c, sf.precision);
      write_residual(out, sf, static_cast<std::uint32_t>(x.size()));
      return;
  }
}

unsigned block_size_code(std::uint32_t bs) {
  switch (bs) {
    case 192: return 1;
    case 576: return 2;
    case 1152: return 3;
    case 2304: return 4;
    case 4608: return 5;
    case 256: return 8;
    case 512: return 9;
    case 1024: return 10;
    case 2048: return 11;
    case 4096: return 12;
    case 8192: return 13;
    case 16384: return 14;
    case 32768: return 15;
    default: return bs <= 256 ? 6 : 7;
  }
}

unsigned sample_rate_code(std::uint32_t rate) {
  switch (rate) {
    case 88200: return 1;
    case 176400: return 2;
    case 192000: return 3;
    case 8000: return 4;
    case 16000: return 5;
    case 22050: return 6;
    case 24000: return 7;
    case 32000: return 8;
    case 44100: return 9;
    case 48000: return 10;
    case 96000: return 11;
    default: return 0;  // taken from STREAMINFO
  }
}

unsigned sample_size_code(unsigned bps) {
  switch (bps) {
    case 8: return 1;
    case 12: return 2;
    case 16: return 4;
    case 20: return 5;
    case 24: return 6;
    default: return 0;
  }
}

}  // namespace

std::vector<std::uint8_t> encode(std::span<const std::int32_t> interleaved,
                                 std::uint32_t channels,
                                 std::uint32_t bits_per_sample,
                                 std::uint32_t sample_rate,
                                 const EncoderOptions& options) {
  if (channels < 1 || channels > 8) {
    throw Error(ErrorCode::kEncoder, "FLAC supports 1 to 8 channels");
  }
  if (bits_per_sample < 4 || bits_per_sample > 24) {
    throw Error(ErrorCode::kEncoder, "unsupported FLAC sample size");
  }
  if (sample_rate == 0 || sample_rate >= (1u << 20)) {
    throw Error(ErrorCode::kEncoder, "unsupported FLAC sample rate");
  }
  if (options.block_size < 16 || options.block_size > 65535) {
    throw Error(ErrorCode::kEncoder, "FLAC block size must be in [16, 65535]");
  }
  if (options.qlp_precision < 2 || options.qlp_precision > 15) {
    throw Error(ErrorCode::kEncoder, "LPC precision must be in [2, 15]");
  }
  if (interleaved.size() % channels != 0) {
    throw Error(ErrorCode::kEncoder, "sample count not a multiple of channels");
  }
  const std::int64_t lo = -(1ll << (bits_per_sample - 1));
  const std::int64_t hi = (1ll << (bits_per_sample - 1)) - 1;
  for (std::int32_t v : interleaved) {
    if (v < lo || v > hi) throw Error(ErrorCode::kEncoder, "sample exceeds bit depth");
  }

  const std::uint64_t total = interleaved.size() / channels;
  const std::uint32_t block = options.block_size;

  BitWriter frames_out;
  std::uint32_t min_frame = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t max_frame = 0;
  std::vector<std::int32_t> channel_buf;

  std::uint64_t frame_number = 0;
  for (std::uint64_t start = 0; start < total; start += block, ++frame_number) {
    const auto bs = static_cast<std::uint32_t>(std::min<std::uint64_t>(block, total - start));
    const std::size_t frame_begin = frames_out.byte_size();

    frames_out.write(0xFFF8, 16);
    const unsigned bs_code = block_size_code(bs);
    frames_out.write(bs_code, 4);
    frames_out.write(sample_rate_code(sample_rate), 4);
    frames_out.write(channels - 1, 4);
    frames_out.write(sample_size_code(bits_per_sample), 3);
    frames_out.write(0, 1);
    frames_out.write_utf8(frame_number);
    if (bs_code == 6) frames_out.write(bs - 1, 8);
    if (bs_code == 7) frames_out.write(bs - 1, 16);
    const auto& header = frames_out.bytes();
    frames_out.write(detail::crc8(std::span(header).subspan(frame_begin)), 8);

    for (std::uint32_t ch = 0; ch < channels; ++ch) {
      channel_buf.resize(bs);
      for (std::uint32_t i = 0; i < bs; ++i) {
        channel_buf[i] = interleaved[(start + i) * channels + ch];
      }
      const Subframe sf = choose_subframe(channel_buf, bits_per_sample, options);
      write_subframe(frames_out, sf, channel_buf, bits_per_sample);
    }
    frames_out.align();
    const auto& body = frames_out.bytes();
    frames_out.write(detail::crc16(std::span(body).subspan(frame_begin)), 16);

    const auto frame_bytes = static_cast<std::uint32_t>(frames_out.byte_size() - frame_begin);
    min_frame = std::min(min_frame, frame_bytes);
    max_frame = std::max(max_frame, frame_bytes);
  }
  if (total == 0) min_frame = 0;

  BitWriter head;
  head.write('f', 8);
  head.write('L', 8);
  head.write('a', 8);
  head.write('C', 8);
  head.write(1, 1);   // last metadata block
  head.write(0, 7);   // STREAMINFO
  head.write(34, 24);
  const auto nominal_block =
      static_cast<std::uint32_t>(std::min<std::uint64_t>(block, std::max<std::uint64_t>(total, 16)));
  head.write(nominal_block, 16);
  head.write(nominal_block, 16);
  head.write(min_frame, 24);
  head.write(max_frame, 24);
  head.write(sample_rate, 20);
  head.write(channels - 1, 3);
  head.write(bits_per_sample - 1, 5);
  head.write(total, 36);
  for (int i = 0; i < 16; ++i) head.write(0, 8);  // MD5 not computed

  std::vector<std::uint8_t> out = std::move(head.bytes());
  const auto& fb = frames_out.bytes();
  out.insert(out.end(), fb.begin(), fb.end());
  return out;
}

}  // namespace mdlscore::flac
