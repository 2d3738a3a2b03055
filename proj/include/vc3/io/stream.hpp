// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vc3/codec.hpp"

namespace vc3::io {

// On-disk layout, all multi-byte fields little-endian:
//
//   offset  size  field
//        0     4  magic "VC3C"
//        4     1  version (1)
//        5     5  s, e, m, p, t
//       10     1  exponent bias
//       11     1  reserved, written as 0
//       12     8  word count
//       20  8*count  words
inline constexpr std::array<char, 4> kMagic = {'V', 'C', '3', 'C'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 20;

struct StreamHeader {
  BitLayout layout;
  std::uint64_t count = 0;
};

inline void store_le64(unsigned char* out, std::uint64_t v) noexcept {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

inline std::uint64_t load_le64(const unsigned char* in) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}

inline std::array<unsigned char, kHeaderSize> encode_header(const StreamHeader& h) noexcept {
  std::array<unsigned char, kHeaderSize> out{};
  std::memcpy(out.data(), kMagic.data(), 4);
  out[4] = kVersion;
  out[5] = static_cast<unsigned char>(h.layout.sign_bits());
  out[6] = static_cast<unsigned char>(h.layout.exponent_bits());
  out[7] = static_cast<unsigned char>(h.layout.mantissa_bits());
  out[8] = static_cast<unsigned char>(h.layout.phi_bits());
  out[9] = static_cast<unsigned char>(h.layout.theta_bits());
  out[10] = static_cast<unsigned char>(h.layout.bias());
  out[11] = 0;
  store_le64(out.data() + 12, h.count);
  return out;
}

/// Throws BadMagic (wrong magic or version) or BadLayout.
inline StreamHeader decode_header(std::span<const unsigned char, kHeaderSize> in) {
  if (std::memcmp(in.data(), kMagic.data(), 4) != 0) {
    throw error(errc::bad_magic, "not a VC3C stream");
  }
  if (in[4] != kVersion) {
    throw error(errc::bad_magic, "unsupported stream version " + std::to_string(in[4]));
  }
  StreamHeader h;
  try {
    h.layout = BitLayout::make(in[5], in[6], in[7], in[8], in[9], in[10]);
  } catch (const error& e) {
    throw error(errc::bad_layout, e.what());
  }
  h.count = load_le64(in.data() + 12);
  return h;
}

inline void write_stream(std::ostream& out, const BitLayout& layout,
                         std::span<const CompressedWord> words) {
  const auto header = encode_header({layout, words.size()});
  out.write(reinterpret_cast<const char*>(header.data()), header.size());
  std::vector<unsigned char> buf(8 * words.size());
  for (std::size_t i = 0; i < words.size(); ++i) store_le64(buf.data() + 8 * i, words[i].word);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw error(errc::malformed_input, "write failed");
}

struct Stream {
  BitLayout layout;
  std::vector<CompressedWord> words;
};

/// Reads a header and exactly `count` words. Throws BadMagic, BadLayout or
/// TruncatedStream.
inline Stream read_stream(std::istream& in) {
  std::array<unsigned char, kHeaderSize> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    if (in.gcount() >= 4 && std::memcmp(header.data(), kMagic.data(), 4) != 0) {
      throw error(errc::bad_magic, "not a VC3C stream");
    }
    throw error(errc::truncated_stream, "stream shorter than its 20-byte header");
  }
  const StreamHeader h = decode_header(header);

  Stream s;
  s.layout = h.layout;
  // Read in bounded blocks so a corrupt count cannot force a huge allocation.
  constexpr std::uint64_t kBlock = 1u << 16;
  std::vector<unsigned char> buf;
  for (std::uint64_t done = 0; done < h.count;) {
    const std::uint64_t take = std::min(kBlock, h.count - done);
    buf.resize(8 * take);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      throw error(errc::truncated_stream, "header declares " + std::to_string(h.count) +
                                              " words, stream ends after " +
                                              std::to_string(done + in.gcount() / 8));
    }
    for (std::uint64_t i = 0; i < take; ++i) s.words.push_back({load_le64(buf.data() + 8 * i)});
    done += take;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Raw float triplets (little-endian binary) and CSV
// ---------------------------------------------------------------------------

/// Parses little-endian f32 triplets. Throws MalformedInput when the byte
/// count is not a multiple of 12.
inline std::vector<Vec3> parse_raw_f32(std::span<const unsigned char> bytes) {
  if (bytes.size() % 12 != 0) {
    throw error(errc::malformed_input, "raw input of " + std::to_string(bytes.size()) +
                                           " bytes is not a whole number of f32 triplets");
  }
  std::vector<Vec3> out(bytes.size() / 12);
  for (std::size_t i = 0; i < out.size(); ++i) {
    float f[3];
    for (int k = 0; k < 3; ++k) {
      std::uint32_t u = 0;
      for (int b = 3; b >= 0; --b) u = (u << 8) | bytes[12 * i + 4 * k + b];
      f[k] = std::bit_cast<float>(u);
    }
    out[i] = {f[0], f[1], f[2]};
  }
  return out;
}

inline std::vector<unsigned char> format_raw_f32(std::span<const Vec3> vs) {
  std::vector<unsigned char> out(12 * vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const float f[3] = {vs[i].x, vs[i].y, vs[i].z};
    for (int k = 0; k < 3; ++k) {
      const auto u = std::bit_cast<std::uint32_t>(f[k]);
      for (int b = 0; b < 4; ++b) out[12 * i + 4 * k + b] = static_cast<unsigned char>(u >> (8 * b));
    }
  }
  return out;
}

/// Shortest decimal that parses back to the same float.
inline std::string format_float(float f) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, f);
  return std::string(buf, res.ptr);
}

/// One "x,y,z" row per line. Blank lines and lines starting with '#' are
/// skipped, as is a leading "x,y,z" header. Throws MalformedInput with the
/// line number.
inline std::vector<Vec3> parse_csv(std::string_view text) {
  std::vector<Vec3> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    if (out.empty() && line == "x,y,z") continue;

    float f[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 3; ++k) {
      while (p < end && *p == ' ') ++p;
      if (p < end && *p == '+') ++p;
      const auto res = std::from_chars(p, end, f[k]);
      if (res.ec != std::errc{}) {
        throw error(errc::malformed_input, "line " + std::to_string(line_no) + ": bad number");
      }
      p = res.ptr;
      while (p < end && *p == ' ') ++p;
      if (k < 2) {
        if (p == end || *p != ',') {
          throw error(errc::malformed_input, "line " + std::to_string(line_no) + ": expected 3 fields");
        }
        ++p;
      }
    }
    if (p != end) {
      throw error(errc::malformed_input, "line " + std::to_string(line_no) + ": trailing characters");
    }
    out.push_back({f[0], f[1], f[2]});
  }
  return out;
}

inline std::string format_csv(std::span<const Vec3> vs, bool header = true) {
  std::string out;
  if (header) out += "x,y,z\n";
  for (const auto& v : vs) {
    out += format_float(v.x);
    out += ',';
    out += format_float(v.y);
    out += ',';
    out += format_float(v.z);
    out += '\n';
  }
  return out;
}

}  // namespace vc3::io
