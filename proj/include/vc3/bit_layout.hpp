// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vc3/error.hpp"

namespace vc3 {

/// Partition of the 64-bit word, written <s,e,m>-p-t.
///
/// The top s+e+m bits hold the magnitude: an optional (always zero) sign bit,
/// an e-bit exponent stored with `bias`, and the m leading mantissa bits of a
/// single-precision value. The next p bits hold the polar bucket n_phi and the
/// lowest t bits the azimuth bucket n_theta.
///
/// Exponent field 0 is reserved for an exact zero magnitude and field 1 marks
/// the (flushed) subnormal range, so normal magnitudes use fields
/// [2, 2^e - 2]. The top field 2^e - 1 is never produced.
class BitLayout {
 public:
  static constexpr int kWordBits = 64;
  static constexpr int kFloatBias = 127;

  /// The recommended layout <0,7,22>-17-18 with bias 80.
  constexpr BitLayout() noexcept = default;

  /// Validates and builds a layout. Throws vc3::error(invalid_layout).
  static BitLayout make(int s, int e, int m, int p, int t, int bias);
  /// As above with the default bias for e (127 for e=8, 80 for e=7).
  static BitLayout make(int s, int e, int m, int p, int t) {
    return make(s, e, m, p, t, default_bias(e));
  }

  /// Default exponent bias for an e-bit exponent. e=8 is IEEE single and e=7
  /// uses 80; narrower fields keep the same 80/128 asymmetry.
  static constexpr int default_bias(int e) noexcept {
    if (e >= 8) return kFloatBias;
    return (80 * (1 << e) + 127) / 128;
  }

  constexpr int sign_bits() const noexcept { return s_; }
  constexpr int exponent_bits() const noexcept { return e_; }
  constexpr int mantissa_bits() const noexcept { return m_; }
  constexpr int phi_bits() const noexcept { return p_; }
  constexpr int theta_bits() const noexcept { return t_; }
  constexpr int bias() const noexcept { return bias_; }

  constexpr int magnitude_bits() const noexcept { return s_ + e_ + m_; }
  constexpr std::uint64_t n_phi_max() const noexcept { return (std::uint64_t{1} << p_) - 1; }
  constexpr std::uint64_t n_theta_max() const noexcept { return (std::uint64_t{1} << t_) - 1; }

  constexpr std::uint32_t exponent_field_min() const noexcept { return 2; }
  constexpr std::uint32_t exponent_field_max() const noexcept { return (1u << e_) - 2; }

  friend constexpr bool operator==(const BitLayout&, const BitLayout&) = default;

 private:
  constexpr BitLayout(int s, int e, int m, int p, int t, int bias) noexcept
      : s_(s), e_(e), m_(m), p_(p), t_(t), bias_(bias) {}

  int s_ = 0;
  int e_ = 7;
  int m_ = 22;
  int p_ = 17;
  int t_ = 18;
  int bias_ = 80;
};

inline BitLayout BitLayout::make(int s, int e, int m, int p, int t, int bias) {
  auto fail = [&](const std::string& why) {
    return error(errc::invalid_layout, "<" + std::to_string(s) + "," + std::to_string(e) + "," +
                                           std::to_string(m) + ">-" + std::to_string(p) + "-" +
                                           std::to_string(t) + ": " + why);
  };
  if (s < 0 || s > 1) throw fail("sign bits must be 0 or 1");
  // A 1-bit exponent has no room for a normal field once 0 and 1 are reserved.
  if (e < 2 || e > 8) throw fail("exponent bits must be in [2, 8]");
  if (m < 1 || m > 23) throw fail("mantissa bits must be in [1, 23]");
  if (p < 1 || p > 32) throw fail("phi bits must be in [1, 32]");
  if (t < 1 || t > 32) throw fail("theta bits must be in [1, 32]");
  if (s + e + m + p + t != kWordBits) throw fail("fields must sum to 64 bits");
  if (e == 8 && bias != kFloatBias) throw fail("an 8-bit exponent requires bias 127");
  // Every normal field must map onto a normal single-precision exponent.
  const int lowest = 2 + kFloatBias - bias;
  const int highest = (1 << e) - 2 + kFloatBias - bias;
  if (lowest < 1 || highest > 254) {
    throw fail("bias " + std::to_string(bias) + " maps outside the single-precision exponent range");
  }
  return BitLayout(s, e, m, p, t, bias);
}

/// Canonical text form, e.g. "<0,7,22>-17-18" (bias appended as "/b" when it
/// differs from the default for e).
inline std::string to_string(const BitLayout& layout) {
  std::string out = "<" + std::to_string(layout.sign_bits()) + "," +
                    std::to_string(layout.exponent_bits()) + "," +
                    std::to_string(layout.mantissa_bits()) + ">-" +
                    std::to_string(layout.phi_bits()) + "-" + std::to_string(layout.theta_bits());
  if (layout.bias() != BitLayout::default_bias(layout.exponent_bits())) {
    out += "/" + std::to_string(layout.bias());
  }
  return out;
}

/// Parses "s,e,m-p-t", optionally wrapped as "<s,e,m>-p-t" or "⟨s,e,m⟩-p-t",
/// with an optional "/bias" suffix. Throws vc3::error(invalid_layout).
inline BitLayout parse_layout(std::string_view text) {
  const std::string original(text);
  std::string cleaned;
  for (std::size_t i = 0; i < text.size();) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == '<' || c == '>' || c == ' ') {
      ++i;
    } else if (c == 0xE2 && text.substr(i, 3) == "⟨") {
      i += 3;
    } else if (c == 0xE2 && text.substr(i, 3) == "⟩") {
      i += 3;
    } else {
      cleaned.push_back(static_cast<char>(c));
      ++i;
    }
  }

  std::vector<int> values;
  int bias = -1;
  std::string_view rest = cleaned;
  const char* expected_separators = ",,--/";
  for (int field = 0; field < 6 && !rest.empty(); ++field) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
    if (ec != std::errc{} || ptr == rest.data()) {
      throw error(errc::invalid_layout, "cannot parse layout '" + original + "'");
    }
    if (field == 5) {
      bias = value;
    } else {
      values.push_back(value);
    }
    rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
    if (rest.empty()) break;
    if (field >= 5 || rest.front() != expected_separators[field]) {
      throw error(errc::invalid_layout, "cannot parse layout '" + original + "'");
    }
    rest.remove_prefix(1);
    if (rest.empty()) throw error(errc::invalid_layout, "cannot parse layout '" + original + "'");
  }
  if (values.size() != 5 || !rest.empty()) {
    throw error(errc::invalid_layout, "cannot parse layout '" + original + "'");
  }
  if (bias < 0) return BitLayout::make(values[0], values[1], values[2], values[3], values[4]);
  return BitLayout::make(values[0], values[1], values[2], values[3], values[4], bias);
}

}  // namespace vc3
