// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "vc3/error.hpp"

namespace vc3 {

enum class Precision : unsigned char { f32, f64 };

constexpr char to_char(Precision p) noexcept { return p == Precision::f32 ? 'S' : 'D'; }

/// Working precision of the compression intermediates.
///
/// theta covers the arctangent, phi the z/r quotient and arccosine, and
/// quantisation the scale-and-round of both angles. The default computes phi
/// in double and everything else in single, which keeps the arithmetic error
/// well below the quantisation error at single-precision cost for theta.
struct PrecisionPolicy {
  Precision theta = Precision::f32;
  Precision phi = Precision::f64;
  Precision quantisation = Precision::f32;

  static constexpr PrecisionPolicy recommended() noexcept { return {}; }
  static constexpr PrecisionPolicy all_single() noexcept {
    return {Precision::f32, Precision::f32, Precision::f32};
  }
  static constexpr PrecisionPolicy all_double() noexcept {
    return {Precision::f64, Precision::f64, Precision::f64};
  }

  /// Precision used for the stored magnitude: the wider of theta and phi.
  constexpr Precision magnitude() const noexcept {
    return theta == Precision::f64 || phi == Precision::f64 ? Precision::f64 : Precision::f32;
  }

  friend constexpr bool operator==(const PrecisionPolicy&, const PrecisionPolicy&) = default;
};

inline std::string to_string(const PrecisionPolicy& policy) {
  return std::string("theta=") + to_char(policy.theta) + ",phi=" + to_char(policy.phi) +
         ",quant=" + to_char(policy.quantisation);
}

/// Parses "theta=S|D,phi=S|D,quant=S|D"; omitted keys keep the recommended
/// value. "single" and "double" select all-single and all-double.
inline PrecisionPolicy parse_policy(std::string_view text) {
  if (text == "single") return PrecisionPolicy::all_single();
  if (text == "double") return PrecisionPolicy::all_double();
  if (text == "default" || text == "recommended") return PrecisionPolicy::recommended();

  PrecisionPolicy policy;
  const std::string original(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);

    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq + 2 != item.size()) {
      throw error(errc::malformed_input, "cannot parse policy '" + original + "'");
    }
    const auto key = item.substr(0, eq);
    Precision value;
    switch (item[eq + 1]) {
      case 'S': case 's': value = Precision::f32; break;
      case 'D': case 'd': value = Precision::f64; break;
      default: throw error(errc::malformed_input, "cannot parse policy '" + original + "'");
    }
    if (key == "theta") {
      policy.theta = value;
    } else if (key == "phi") {
      policy.phi = value;
    } else if (key == "quant") {
      policy.quantisation = value;
    } else {
      throw error(errc::malformed_input, "unknown policy key in '" + original + "'");
    }
  }
  return policy;
}

}  // namespace vc3
