// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

#include "vc3/analysis/studies.hpp"

namespace vc3::analysis {

enum class CompanderKind { uniform, cosine, tanh };

/// Monotone map f: [0,1] -> [0,1] applied to a normalised angle psi before
/// uniform rounding, n = nint(n_max f(psi)).
///
///   uniform  f(psi) = psi
///   cosine   f(psi) = (1 - cos(pi psi)) / 2
///   tanh     f(psi) = m (tanh(gamma (2 psi - 1)) + c), c = tanh(gamma), m = 1 / 2c
///
/// tanh with gamma > 0 packs buckets toward psi = 1/2.
class Compander {
 public:
  static Compander uniform() noexcept { return Compander(CompanderKind::uniform, 0.0); }
  static Compander cosine() noexcept { return Compander(CompanderKind::cosine, 0.0); }
  static Compander tanh(double gamma) {
    if (!(gamma != 0.0) || !std::isfinite(gamma)) {
      throw error(errc::domain_error, "tanh compander needs a finite non-zero gamma");
    }
    return Compander(CompanderKind::tanh, gamma);
  }

  CompanderKind kind() const noexcept { return kind_; }
  double gamma() const noexcept { return gamma_; }

  double forward(double psi) const noexcept {
    switch (kind_) {
      case CompanderKind::uniform: return psi;
      case CompanderKind::cosine: return 0.5 * (1.0 - std::cos(std::numbers::pi * psi));
      case CompanderKind::tanh: {
        const double c = std::tanh(gamma_);
        return (std::tanh(gamma_ * (2.0 * psi - 1.0)) + c) / (2.0 * c);
      }
    }
    return psi;
  }

  double inverse(double y) const noexcept {
    y = std::clamp(y, 0.0, 1.0);
    switch (kind_) {
      case CompanderKind::uniform: return y;
      case CompanderKind::cosine: return std::acos(1.0 - 2.0 * y) / std::numbers::pi;
      case CompanderKind::tanh: {
        const double c = std::tanh(gamma_);
        const double arg = std::clamp(2.0 * c * y - c, -std::fabs(c), std::fabs(c));
        return 0.5 * (std::atanh(arg) / gamma_ + 1.0);
      }
    }
    return y;
  }

 private:
  Compander(CompanderKind kind, double gamma) noexcept : kind_(kind), gamma_(gamma) {}

  CompanderKind kind_;
  double gamma_;
};

inline std::string to_string(const Compander& c) {
  switch (c.kind()) {
    case CompanderKind::uniform: return "uniform";
    case CompanderKind::cosine: return "cosine";
    case CompanderKind::tanh: return "tanh:" + std::to_string(c.gamma());
  }
  return "unknown";
}

/// "uniform", "cosine", "tanh" (gamma 0.5) or "tanh:GAMMA".
inline Compander parse_compander(std::string_view text) {
  if (text == "uniform") return Compander::uniform();
  if (text == "cosine") return Compander::cosine();
  if (text == "tanh") return Compander::tanh(0.5);
  if (text.starts_with("tanh:")) {
    const std::string g(text.substr(5));
    try {
      std::size_t used = 0;
      const double gamma = std::stod(g, &used);
      if (used == g.size()) return Compander::tanh(gamma);
    } catch (const std::logic_error&) {
    }
  }
  throw error(errc::malformed_input, "unknown compander '" + std::string(text) + "'");
}

/// Bucket index of normalised angle psi in [0,1].
inline std::uint64_t compand(double psi, const Compander& c, std::uint64_t n_max) noexcept {
  const double y = c.forward(std::clamp(psi, 0.0, 1.0)) * static_cast<double>(n_max);
  return vc3::detail::clamp_bucket(nint(y), n_max);
}

/// Normalised angle represented by bucket n.
inline double expand(std::uint64_t n, const Compander& c, std::uint64_t n_max) noexcept {
  return c.inverse(static_cast<double>(n) / static_cast<double>(n_max));
}

/// Round-trip error with companded angle buckets (double intermediates). phi
/// is normalised as psi = phi / pi and theta as psi = (theta + pi) / 2pi. A
/// uniform compander uses the codec's own quantiser for that angle.
inline ErrorStats compand_study(const SampleDomain& domain, const BitLayout& layout,
                                const Compander& theta_compander, const Compander& phi_compander,
                                bool normalised = false) {
  constexpr PrecisionPolicy policy = PrecisionPolicy::all_double();
  const auto n_theta_max = layout.n_theta_max();
  const auto n_phi_max = layout.n_phi_max();
  const bool theta_uniform = theta_compander.kind() == CompanderKind::uniform;
  const bool phi_uniform = phi_compander.kind() == CompanderKind::uniform;

  return collect_errors(domain, normalised, [&](const Vec3& v) {
    const SphericalTriple s = to_spherical(v, policy);
    const MagnitudeCode mag = encode_magnitude(magnitude_to_float(s, policy), layout);
    Vec3 w{};
    if (mag.bits != 0) {
      Angles a;
      if (theta_uniform) {
        a.theta = vc3::detail::dequantize_theta(
            vc3::detail::quantize_theta<double>(s.theta, n_theta_max), n_theta_max);
      } else {
        const double psi = (s.theta + std::numbers::pi) / (2.0 * std::numbers::pi);
        const auto n = compand(psi, theta_compander, n_theta_max);
        a.theta = 2.0 * std::numbers::pi * expand(n, theta_compander, n_theta_max) - std::numbers::pi;
      }
      if (phi_uniform) {
        a.phi = vc3::detail::dequantize_phi(vc3::detail::quantize_phi<double>(s.phi, n_phi_max),
                                            n_phi_max);
      } else {
        const auto n = compand(s.phi / std::numbers::pi, phi_compander, n_phi_max);
        a.phi = std::numbers::pi * expand(n, phi_compander, n_phi_max);
      }
      w = from_spherical(decode_magnitude(mag.bits, layout), a);
    }
    return sample_error(v, w, normalised);
  });
}

// ---------------------------------------------------------------------------
// Variable theta bins
// ---------------------------------------------------------------------------

/// Number of theta bins at polar angle phi that keeps the angular distance
/// between neighbouring bucket centres on adjacent phi rows below tau:
/// ceil(pi n), 1/n = acos((cos tau - cos phi cos(phi + d)) / (sin phi sin(phi + d))),
/// d = pi / (2 n_phi_max). Throws DomainError when the acos argument leaves
/// [-1, 1] (tau below the row spacing, or phi too close to a pole).
inline std::uint64_t smith_theta_bins(double phi, std::uint64_t n_phi_max, double tau) {
  if (!(phi > 0.0 && phi < std::numbers::pi)) throw error(errc::domain_error, "phi must be in (0, pi)");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw error(errc::domain_error, "tau must be positive");
  if (n_phi_max == 0) throw error(errc::domain_error, "n_phi_max must be positive");
  const double d = std::numbers::pi / (2.0 * static_cast<double>(n_phi_max));
  const double arg =
      (std::cos(tau) - std::cos(phi) * std::cos(phi + d)) / (std::sin(phi) * std::sin(phi + d));
  if (!(arg >= -1.0 && arg < 1.0)) {
    throw error(errc::domain_error, "acos argument " + std::to_string(arg) + " outside [-1, 1)");
  }
  const double bins = std::ceil(std::numbers::pi / std::acos(arg));
  return static_cast<std::uint64_t>(bins);
}

}  // namespace vc3::analysis
