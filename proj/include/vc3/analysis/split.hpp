// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vc3/analysis/studies.hpp"

namespace vc3::analysis {

/// Joint angle field of `total_bits` bits holding
/// n_p = n_phi (n_theta_max + 1) + n_theta, so the phi/theta split need not
/// fall on a bit boundary.
class SplitConfig {
 public:
  /// Explicit bucket ranges. Throws InvalidSplit unless
  /// (n_phi_max + 1)(n_theta_max + 1) - 1 < 2^total_bits.
  static SplitConfig make(int total_bits, std::uint64_t n_phi_max, std::uint64_t n_theta_max) {
    if (total_bits < 2 || total_bits > 62) {
      throw error(errc::invalid_split, "total bits must be in [2, 62]");
    }
    if (n_phi_max < 1 || n_theta_max < 1) {
      throw error(errc::invalid_split, "each angle needs at least two buckets");
    }
    const unsigned __int128 capacity = static_cast<unsigned __int128>(1) << total_bits;
    const unsigned __int128 used =
        static_cast<unsigned __int128>(n_phi_max + 1) * (n_theta_max + 1);
    if (used > capacity) {
      throw error(errc::invalid_split, std::to_string(n_phi_max + 1) + " x " +
                                           std::to_string(n_theta_max + 1) +
                                           " buckets exceed 2^" + std::to_string(total_bits));
    }
    return SplitConfig(total_bits, n_phi_max, n_theta_max);
  }

  /// Given phi bucket count n_phi_max + 1; theta gets the largest count that
  /// still fits.
  static SplitConfig for_phi_buckets(int total_bits, std::uint64_t phi_buckets) {
    if (total_bits < 2 || total_bits > 62) {
      throw error(errc::invalid_split, "total bits must be in [2, 62]");
    }
    if (phi_buckets < 2) throw error(errc::invalid_split, "need at least two phi buckets");
    const std::uint64_t theta_buckets = (std::uint64_t{1} << total_bits) / phi_buckets;
    if (theta_buckets < 2) {
      throw error(errc::invalid_split, std::to_string(phi_buckets) +
                                           " phi buckets leave no room for theta in 2^" +
                                           std::to_string(total_bits));
    }
    return make(total_bits, phi_buckets - 1, theta_buckets - 1);
  }

  int total_bits() const noexcept { return total_bits_; }
  std::uint64_t n_phi_max() const noexcept { return n_phi_max_; }
  std::uint64_t n_theta_max() const noexcept { return n_theta_max_; }

  std::uint64_t encode(const QuantizedAngles& q) const noexcept {
    return q.n_phi * (n_theta_max_ + 1) + q.n_theta;
  }
  QuantizedAngles decode(std::uint64_t n_p) const noexcept {
    return {n_p % (n_theta_max_ + 1), n_p / (n_theta_max_ + 1)};
  }

  /// Buckets for (theta, phi) under this split, in precision T.
  template <std::floating_point T>
  QuantizedAngles quantize(double theta, double phi) const noexcept {
    return {vc3::detail::quantize_theta<T>(theta, n_theta_max_),
            vc3::detail::quantize_phi<T>(phi, n_phi_max_)};
  }
  Angles dequantize(const QuantizedAngles& q) const noexcept {
    return {vc3::detail::dequantize_theta(q.n_theta, n_theta_max_),
            vc3::detail::dequantize_phi(q.n_phi, n_phi_max_)};
  }

  friend bool operator==(const SplitConfig&, const SplitConfig&) = default;

 private:
  SplitConfig(int total_bits, std::uint64_t n_phi_max, std::uint64_t n_theta_max) noexcept
      : total_bits_(total_bits), n_phi_max_(n_phi_max), n_theta_max_(n_theta_max) {}

  int total_bits_;
  std::uint64_t n_phi_max_;
  std::uint64_t n_theta_max_;
};

/// Magnitude layout for the bits left over by a joint angle field:
/// <0,7,57-p> with bias 80. The angle fields of the returned layout are
/// placeholders.
inline BitLayout split_magnitude_layout(int total_bits) {
  const int m = 64 - 7 - total_bits;
  if (m < 1 || m > 23) {
    throw error(errc::invalid_split, "a " + std::to_string(total_bits) +
                                         "-bit angle field leaves no valid <0,7,m> magnitude");
  }
  return BitLayout::make(0, 7, m, total_bits / 2, total_bits - total_bits / 2);
}

/// Full round trip of v through a split word (double intermediates), with
/// the packed n_p decoded back by division and modulo.
inline Vec3 split_round_trip(const Vec3& v, const SplitConfig& split, const BitLayout& magnitude) {
  constexpr PrecisionPolicy policy = PrecisionPolicy::all_double();
  const SphericalTriple s = to_spherical(v, policy);
  const MagnitudeCode mag = encode_magnitude(magnitude_to_float(s, policy), magnitude);
  if (mag.bits == 0) return {};
  const std::uint64_t n_p = split.encode(split.quantize<double>(s.theta, s.phi));
  return from_spherical(decode_magnitude(mag.bits, magnitude), split.dequantize(split.decode(n_p)));
}

struct SplitResult {
  SplitConfig config;
  ErrorStats stats;
};

/// Error statistics for each phi bucket count (n_phi_max + 1) in
/// `phi_buckets`, all sharing a `total_bits` joint angle field.
inline std::vector<SplitResult> split_sweep(int total_bits,
                                            const std::vector<std::uint64_t>& phi_buckets,
                                            const SampleDomain& domain, bool normalised = false) {
  const BitLayout magnitude = split_magnitude_layout(total_bits);
  std::vector<SplitConfig> configs;
  for (const auto b : phi_buckets) configs.push_back(SplitConfig::for_phi_buckets(total_bits, b));

  std::vector<SplitResult> out;
  for (const auto& split : configs) {
    out.push_back({split, collect_errors(domain, normalised, [&](const Vec3& v) {
                     return sample_error(v, split_round_trip(v, split, magnitude), normalised);
                   })});
  }
  return out;
}

}  // namespace vc3::analysis
