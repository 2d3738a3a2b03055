// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "vc3/codec.hpp"
#include "vc3/error.hpp"

namespace vc3::analysis {

/// unit_sphere is area-uniform on S^2. sphere_angles draws theta and phi
/// each uniformly, which concentrates samples near the poles. shell draws an
/// area-uniform direction and a radius uniform in volume between r_min and
/// r_max (fixed radius when they are equal).
enum class DomainKind { unit_sphere, sphere_angles, cube, shell };

struct SampleDomain {
  DomainKind kind = DomainKind::unit_sphere;
  std::uint64_t count = 1'000'000;
  std::uint64_t seed = 42;
  double r_min = 1.0;
  double r_max = 1.0;

  static SampleDomain sphere(std::uint64_t count, std::uint64_t seed = 42) {
    return {DomainKind::unit_sphere, count, seed, 1.0, 1.0};
  }
  static SampleDomain sphere_angles(std::uint64_t count, std::uint64_t seed = 42) {
    return {DomainKind::sphere_angles, count, seed, 1.0, 1.0};
  }
  static SampleDomain cube(std::uint64_t count, std::uint64_t seed = 42) {
    return {DomainKind::cube, count, seed, 1.0, 1.0};
  }
  static SampleDomain shell(double r_min, double r_max, std::uint64_t count,
                            std::uint64_t seed = 42) {
    if (!(r_min > 0.0) || !(r_max >= r_min) || !std::isfinite(r_max)) {
      throw error(errc::malformed_input, "shell radii must satisfy 0 < r_min <= r_max");
    }
    return {DomainKind::shell, count, seed, r_min, r_max};
  }
};

// ---------------------------------------------------------------------------
// Counter-based generator: sample i of a domain depends only on (seed, i), so
// any chunking of the index range reproduces the same stream.
// ---------------------------------------------------------------------------

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) for stream position `counter`.
constexpr double uniform01(std::uint64_t seed, std::uint64_t counter) noexcept {
  const std::uint64_t bits = splitmix64(splitmix64(seed) ^ (counter * 0xD1B54A32D192ED03ull));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

namespace detail {

struct Direction {
  double x, y, z;
};

inline Direction area_uniform_direction(double u0, double u1) noexcept {
  const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * u0;
  const double c = 1.0 - 2.0 * u1;  // cos(phi) in (-1, 1]
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  return {s * std::cos(theta), s * std::sin(theta), c};
}

}  // namespace detail

/// Sample `index` of the domain, generated in double and rounded to single.
inline Vec3 sample_at(const SampleDomain& domain, std::uint64_t index) noexcept {
  const std::uint64_t base = 3 * index;
  const double u0 = uniform01(domain.seed, base);
  const double u1 = uniform01(domain.seed, base + 1);
  const double u2 = uniform01(domain.seed, base + 2);
  double x = 0.0, y = 0.0, z = 0.0;
  switch (domain.kind) {
    case DomainKind::unit_sphere: {
      const auto d = detail::area_uniform_direction(u0, u1);
      x = d.x; y = d.y; z = d.z;
      break;
    }
    case DomainKind::sphere_angles: {
      const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * u0;
      const double phi = std::numbers::pi * u1;
      x = std::cos(theta) * std::sin(phi);
      y = std::sin(theta) * std::sin(phi);
      z = std::cos(phi);
      break;
    }
    case DomainKind::cube:
      x = 2.0 * u0 - 1.0;
      y = 2.0 * u1 - 1.0;
      z = 2.0 * u2 - 1.0;
      break;
    case DomainKind::shell: {
      const auto d = detail::area_uniform_direction(u0, u1);
      double r = domain.r_min;
      if (domain.r_max > domain.r_min) {
        // Volume-uniform radius, computed relative to r_max to stay in range.
        const double q = domain.r_min / domain.r_max;
        r = domain.r_max * std::cbrt(q * q * q + u2 * (1.0 - q * q * q));
      }
      x = r * d.x; y = r * d.y; z = r * d.z;
      break;
    }
  }
  return {static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)};
}

inline std::vector<Vec3> sample(const SampleDomain& domain) {
  std::vector<Vec3> out;
  out.reserve(domain.count);
  for (std::uint64_t i = 0; i < domain.count; ++i) out.push_back(sample_at(domain, i));
  return out;
}

inline std::string to_string(const SampleDomain& domain) {
  switch (domain.kind) {
    case DomainKind::unit_sphere: return "sphere";
    case DomainKind::sphere_angles: return "sphere-angles";
    case DomainKind::cube: return "cube";
    case DomainKind::shell: {
      char buf[96];
      std::snprintf(buf, sizeof buf, "shell:%.17g:%.17g", domain.r_min, domain.r_max);
      return buf;
    }
  }
  return "unknown";
}

/// Parses "sphere", "sphere-angles", "cube" or "shell:MIN:MAX".
inline SampleDomain parse_domain(std::string_view text, std::uint64_t count, std::uint64_t seed) {
  if (text == "sphere") return SampleDomain::sphere(count, seed);
  if (text == "sphere-angles") return SampleDomain::sphere_angles(count, seed);
  if (text == "cube") return SampleDomain::cube(count, seed);
  if (text.starts_with("shell:")) {
    const std::string rest(text.substr(6));
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      try {
        std::size_t used_lo = 0, used_hi = 0;
        const double lo = std::stod(rest.substr(0, colon), &used_lo);
        const double hi = std::stod(rest.substr(colon + 1), &used_hi);
        if (used_lo == colon && used_hi == rest.size() - colon - 1) {
          return SampleDomain::shell(lo, hi, count, seed);
        }
      } catch (const std::logic_error&) {
      }
    }
  }
  throw error(errc::malformed_input, "unknown domain '" + std::string(text) + "'");
}

}  // namespace vc3::analysis
