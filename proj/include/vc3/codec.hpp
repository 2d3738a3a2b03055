// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>

#include "vc3/bit_layout.hpp"
#include "vc3/error.hpp"
#include "vc3/precision.hpp"

namespace vc3 {

struct Vec3 {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

/// r >= 0, theta in [-pi, pi], phi in [0, pi]. theta reaches +pi only for
/// vectors on the negative x half-plane with y = +0 (atan2 convention); the
/// quantiser clamps that end onto the last bucket.
struct SphericalTriple {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct QuantizedAngles {
  std::uint64_t n_theta = 0;
  std::uint64_t n_phi = 0;

  friend constexpr bool operator==(const QuantizedAngles&, const QuantizedAngles&) = default;
};

struct CompressedWord {
  std::uint64_t word = 0;

  friend constexpr bool operator==(const CompressedWord&, const CompressedWord&) = default;
};
static_assert(sizeof(CompressedWord) == 8);

enum class MagnitudeEvent : unsigned char { none, flushed, saturated };

struct MagnitudeCode {
  std::uint32_t bits = 0;
  MagnitudeEvent event = MagnitudeEvent::none;
};

/// Flush/saturate tallies accumulated by the counting overload of compress().
struct CodecCounters {
  std::uint64_t flushed = 0;
  std::uint64_t saturated = 0;
};

// ---------------------------------------------------------------------------
// Scalar helpers
// ---------------------------------------------------------------------------

/// Round to nearest, halves toward +inf: ceil(floor(2x) / 2). Every step is
/// exact in binary floating point, so this is exact for any finite x.
template <std::floating_point T>
constexpr T nint_value(T x) noexcept {
  return std::ceil(std::floor(T{2} * x) / T{2});
}

inline std::int64_t nint(double x) noexcept {
  return static_cast<std::int64_t>(nint_value(x));
}

/// Narrow to float, rounding toward zero. Moving one ulp toward or away from
/// zero is -1 or +1 on the bit pattern.
inline float narrow_toward_zero(double d) noexcept {
  const float f = static_cast<float>(d);
  if (std::fabs(static_cast<double>(f)) > std::fabs(d)) {
    return std::bit_cast<float>(std::bit_cast<std::uint32_t>(f) - 1u);  // f != 0 here
  }
  return f;
}

/// Narrow to float, rounding away from zero.
inline float narrow_away_from_zero(double d) noexcept {
  const float f = static_cast<float>(d);
  if (std::fabs(static_cast<double>(f)) < std::fabs(d)) {
    return std::bit_cast<float>(std::bit_cast<std::uint32_t>(f) + 1u);  // f is finite
  }
  return f;
}

inline bool is_finite(const Vec3& v) noexcept {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// ---------------------------------------------------------------------------
// Cartesian <-> spherical
// ---------------------------------------------------------------------------

/// Spherical coordinates of v with intermediates chosen by `policy`.
///
/// theta = atan2(y, x) (atan2(0, 0) = 0) and phi = acos(z / r). The quotient
/// uses an r evaluated in phi's precision; the returned r is evaluated in the
/// wider of the theta and phi precisions. The zero vector maps to (0, 0, 0).
inline SphericalTriple to_spherical(const Vec3& v, PrecisionPolicy policy) {
  if (!is_finite(v)) throw error(errc::non_finite_input, "vector component is NaN or infinite");

  const double xd = v.x;
  const double yd = v.y;
  const double zd = v.z;
  // Products of two floats are exact in double.
  const double rd = std::sqrt(xd * xd + yd * yd + zd * zd);
  if (rd == 0.0) return {};

  // Squares of floats can overflow or go subnormal in single precision; those
  // inputs take the quotient and r from the double evaluation.
  const float sum_sq = v.x * v.x + v.y * v.y + v.z * v.z;
  const bool single_r_ok = std::isnormal(sum_sq);
  const float rf = single_r_ok ? std::sqrt(sum_sq) : narrow_toward_zero(rd);

  SphericalTriple s;
  s.theta = policy.theta == Precision::f32 ? static_cast<double>(std::atan2(v.y, v.x))
                                           : std::atan2(yd, xd);
  if (policy.phi == Precision::f32) {
    const float q = single_r_ok ? v.z / rf : static_cast<float>(zd / rd);
    const float c = std::clamp(q, -1.0f, 1.0f);
    s.phi = static_cast<double>(std::acos(c));
  } else {
    s.phi = std::acos(std::clamp(zd / rd, -1.0, 1.0));
  }
  s.r = policy.magnitude() == Precision::f64 ? rd : static_cast<double>(rf);
  return s;
}

// ---------------------------------------------------------------------------
// Angle quantisation
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t clamp_bucket(std::int64_t n, std::uint64_t n_max) noexcept {
  if (n < 0) return 0;
  return std::min(static_cast<std::uint64_t>(n), n_max);
}

/// nint(n_max (theta + pi) / 2pi) without forming theta + pi. With
/// a = n_max theta / 2pi this is nint(a + n_max/2): for odd n_max that equals
/// floor(a) + (n_max + 1)/2, for even n_max nint(a) + n_max/2. floor() and
/// nint() carry the sign of a.
template <std::floating_point T>
std::uint64_t quantize_theta(double theta, std::uint64_t n_max) noexcept {
  const T scale = static_cast<T>(static_cast<double>(n_max) / (2.0 * std::numbers::pi));
  const T a = static_cast<T>(theta) * scale;
  const std::int64_t n = (n_max % 2 == 1)
                             ? static_cast<std::int64_t>((n_max + 1) / 2) +
                                   static_cast<std::int64_t>(std::floor(a))
                             : static_cast<std::int64_t>(n_max / 2) +
                                   static_cast<std::int64_t>(nint_value(a));
  return clamp_bucket(n, n_max);
}

/// nint(n_max phi / pi).
template <std::floating_point T>
std::uint64_t quantize_phi(double phi, std::uint64_t n_max) noexcept {
  const T scale = static_cast<T>(static_cast<double>(n_max) / std::numbers::pi);
  const T b = static_cast<T>(phi) * scale;
  return clamp_bucket(static_cast<std::int64_t>(nint_value(b)), n_max);
}

inline double dequantize_theta(std::uint64_t n, std::uint64_t n_max) noexcept {
  return std::numbers::pi * (2.0 * static_cast<double>(n) / static_cast<double>(n_max) - 1.0);
}

inline double dequantize_phi(std::uint64_t n, std::uint64_t n_max) noexcept {
  return std::numbers::pi * static_cast<double>(n) / static_cast<double>(n_max);
}

template <std::floating_point T>
QuantizedAngles quantize(double theta, double phi, const BitLayout& layout) noexcept {
  return {quantize_theta<T>(theta, layout.n_theta_max()), quantize_phi<T>(phi, layout.n_phi_max())};
}

}  // namespace detail

/// Bucket indices for (theta, phi); results are clamped to [0, n_max].
inline QuantizedAngles quantize_angles(const SphericalTriple& s, const BitLayout& layout,
                                       PrecisionPolicy policy) noexcept {
  return policy.quantisation == Precision::f32 ? detail::quantize<float>(s.theta, s.phi, layout)
                                               : detail::quantize<double>(s.theta, s.phi, layout);
}

struct Angles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Bucket centres: theta = pi (2 n / n_max - 1), phi = pi n / n_max.
inline Angles dequantize_angles(const QuantizedAngles& q, const BitLayout& layout) noexcept {
  return {detail::dequantize_theta(q.n_theta, layout.n_theta_max()),
          detail::dequantize_phi(q.n_phi, layout.n_phi_max())};
}

// ---------------------------------------------------------------------------
// Magnitude
// ---------------------------------------------------------------------------

/// Re-biases the exponent of r and keeps the top m mantissa bits.
///
/// Zero encodes to the all-zero field. Values whose re-biased exponent lands
/// on or below the subnormal marker flush up to the lowest normal value;
/// values above the top normal field saturate to the largest encodable value.
inline MagnitudeCode encode_magnitude(float r, const BitLayout& layout) {
  if (!std::isfinite(r)) throw error(errc::non_finite_input, "magnitude is NaN or infinite");
  if (r < 0.0f) throw error(errc::domain_error, "magnitude must be non-negative");
  if (r == 0.0f) return {};

  const int m = layout.mantissa_bits();
  const auto bits = std::bit_cast<std::uint32_t>(r);
  const auto biased8 = static_cast<int>((bits >> 23) & 0xFFu);
  const std::uint32_t fraction = bits & 0x7FFFFFu;

  // Float subnormals (biased8 == 0) always flush.
  const int biased = biased8 == 0 ? 0 : biased8 - BitLayout::kFloatBias + layout.bias();
  const auto lo = static_cast<int>(layout.exponent_field_min());
  const auto hi = static_cast<int>(layout.exponent_field_max());

  if (biased < lo) {
    return {static_cast<std::uint32_t>(lo) << m, MagnitudeEvent::flushed};
  }
  if (biased > hi) {
    return {(static_cast<std::uint32_t>(hi) << m) | ((1u << m) - 1u), MagnitudeEvent::saturated};
  }
  return {(static_cast<std::uint32_t>(biased) << m) | (fraction >> (23 - m)), MagnitudeEvent::none};
}

/// Inverse of encode_magnitude: exponent re-biased back to single precision,
/// mantissa zero-extended. Field 0 decodes to 0; other out-of-range exponent
/// fields (never produced by the encoder) clamp to the normal range.
inline float decode_magnitude(std::uint32_t field, const BitLayout& layout) noexcept {
  const int m = layout.mantissa_bits();
  const std::uint32_t mantissa = field & ((1u << m) - 1u);
  std::uint32_t exponent = (field >> m) & ((1u << layout.exponent_bits()) - 1u);
  if (exponent == 0) return 0.0f;
  exponent = std::clamp(exponent, layout.exponent_field_min(), layout.exponent_field_max());
  const auto biased8 = static_cast<std::uint32_t>(static_cast<int>(exponent) +
                                                  BitLayout::kFloatBias - layout.bias());
  return std::bit_cast<float>((biased8 << 23) | (mantissa << (23 - m)));
}

// ---------------------------------------------------------------------------
// Packing
// ---------------------------------------------------------------------------

/// MSB -> LSB: [magnitude (s+e+m) | n_phi (p) | n_theta (t)].
constexpr CompressedWord pack(std::uint32_t magnitude, const QuantizedAngles& q,
                              const BitLayout& layout) noexcept {
  const int t = layout.theta_bits();
  const int p = layout.phi_bits();
  return {(static_cast<std::uint64_t>(magnitude) << (p + t)) | (q.n_phi << t) | q.n_theta};
}

struct UnpackedWord {
  std::uint32_t magnitude = 0;
  QuantizedAngles angles;
};

constexpr UnpackedWord unpack(CompressedWord w, const BitLayout& layout) noexcept {
  const int t = layout.theta_bits();
  const int p = layout.phi_bits();
  const int mag = layout.magnitude_bits();
  UnpackedWord u;
  u.angles.n_theta = w.word & layout.n_theta_max();
  u.angles.n_phi = (w.word >> t) & layout.n_phi_max();
  u.magnitude = static_cast<std::uint32_t>((w.word >> (p + t)) & ((std::uint64_t{1} << mag) - 1));
  return u;
}

// ---------------------------------------------------------------------------
// compress / decompress
// ---------------------------------------------------------------------------

/// r as handed to encode_magnitude. Mantissa bits are dropped, never rounded,
/// so a double r is narrowed the same way.
inline float magnitude_to_float(const SphericalTriple& s, PrecisionPolicy policy) noexcept {
  return policy.magnitude() == Precision::f64 ? narrow_toward_zero(s.r) : static_cast<float>(s.r);
}

/// (r cos theta sin phi, r sin theta sin phi, r cos phi) evaluated in double,
/// each component narrowed away from zero.
inline Vec3 from_spherical(float r, const Angles& a) noexcept {
  if (r == 0.0f) return {};
  const double rd = r;
  const double sin_phi = std::sin(a.phi);
  return {narrow_away_from_zero(rd * std::cos(a.theta) * sin_phi),
          narrow_away_from_zero(rd * std::sin(a.theta) * sin_phi),
          narrow_away_from_zero(rd * std::cos(a.phi))};
}

inline CompressedWord compress(const Vec3& v, const BitLayout& layout, PrecisionPolicy policy,
                               CodecCounters& counters) {
  const SphericalTriple s = to_spherical(v, policy);
  const MagnitudeCode mag = encode_magnitude(magnitude_to_float(s, policy), layout);
  if (mag.event == MagnitudeEvent::flushed) ++counters.flushed;
  if (mag.event == MagnitudeEvent::saturated) ++counters.saturated;
  if (mag.bits == 0) return {};
  return pack(mag.bits, quantize_angles(s, layout, policy), layout);
}

/// Compresses one vector into one 64-bit word. Throws on NaN/Inf components.
inline CompressedWord compress(const Vec3& v, const BitLayout& layout = {},
                               PrecisionPolicy policy = {}) {
  CodecCounters ignored;
  return compress(v, layout, policy, ignored);
}

/// Reconstructs a vector from a word. Total over all 64-bit inputs.
///
/// Components are evaluated in double and narrowed away from zero so the
/// reconstructed norm never falls below the decoded magnitude; re-compressing
/// the output therefore truncates back onto the same magnitude field.
inline Vec3 decompress(CompressedWord w, const BitLayout& layout = {}) noexcept {
  const UnpackedWord u = unpack(w, layout);
  return from_spherical(decode_magnitude(u.magnitude, layout), dequantize_angles(u.angles, layout));
}

// ---------------------------------------------------------------------------
// First-order error model
// ---------------------------------------------------------------------------

struct Vec3d {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double norm(const Vec3d& v) noexcept { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

/// Worst-case first-order reconstruction error at s, using the half bucket
/// widths eps_theta = pi / n_theta_max and eps_phi = pi / (2 n_phi_max).
/// Its norm is r sqrt(eps_phi^2 + eps_theta^2 sin^2 phi).
inline Vec3d predict_error(const SphericalTriple& s, const BitLayout& layout) noexcept {
  const double eps_theta = std::numbers::pi / static_cast<double>(layout.n_theta_max());
  const double eps_phi = std::numbers::pi / (2.0 * static_cast<double>(layout.n_phi_max()));
  const double ct = std::cos(s.theta);
  const double st = std::sin(s.theta);
  const double cp = std::cos(s.phi);
  const double sp = std::sin(s.phi);
  return {s.r * (eps_phi * ct * cp - eps_theta * st * sp),
          s.r * (eps_phi * st * cp + eps_theta * ct * sp), s.r * eps_phi * sp};
}

}  // namespace vc3
