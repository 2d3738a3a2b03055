// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

#include "vc3/analysis/parallel.hpp"
#include "vc3/analysis/sampling.hpp"
#include "vc3/analysis/stats.hpp"
#include "vc3/codec.hpp"

namespace vc3::analysis {

/// ||v - w||_2 evaluated in double.
inline double distance(const Vec3& v, const Vec3& w) noexcept {
  const double dx = static_cast<double>(v.x) - w.x;
  const double dy = static_cast<double>(v.y) - w.y;
  const double dz = static_cast<double>(v.z) - w.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double norm(const Vec3& v) noexcept { return distance(v, Vec3{}); }

/// Error of reconstructing v as w, optionally relative to ||v||. A zero v has
/// an exact reconstruction and contributes 0 either way.
inline double sample_error(const Vec3& v, const Vec3& w, bool normalised) noexcept {
  const double e = distance(v, w);
  if (!normalised) return e;
  const double r = norm(v);
  return r > 0.0 ? e / r : 0.0;
}

inline void require_samples(const SampleDomain& domain) {
  if (domain.count == 0) throw error(errc::empty_domain, "sample count is zero");
}

/// Accumulates err(v) over every sample of the domain.
template <class ErrorFn>
ErrorStats collect_errors(const SampleDomain& domain, bool normalised, ErrorFn err) {
  require_samples(domain);
  const auto acc = map_chunks<ErrorAccumulator>(
      domain.count,
      [&](std::uint64_t begin, std::uint64_t end) {
        ErrorAccumulator a;
        for (std::uint64_t i = begin; i < end; ++i) a.add(err(sample_at(domain, i)));
        return a;
      },
      [](ErrorAccumulator& total, const ErrorAccumulator& part) { total.merge(part); });
  return acc.stats(normalised);
}

/// e_i = ||v_i - decompress(compress(v_i))||, optionally divided by ||v_i||.
inline ErrorStats error_study(const SampleDomain& domain, const BitLayout& layout,
                              PrecisionPolicy policy, bool normalised) {
  return collect_errors(domain, normalised, [&](const Vec3& v) {
    return sample_error(v, decompress(compress(v, layout, policy), layout), normalised);
  });
}

// ---------------------------------------------------------------------------
// Anisotropy
// ---------------------------------------------------------------------------

struct AnisotropyGrid {
  std::uint32_t n_theta_cells = 36;
  std::uint32_t n_phi_cells = 18;
};

struct CellStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double max = 0.0;
};

struct AnisotropyMap {
  AnisotropyGrid grid;
  std::vector<CellStats> cells;  // row-major: index = phi_cell * n_theta_cells + theta_cell
  ErrorStats global;

  const CellStats& at(std::uint32_t theta_cell, std::uint32_t phi_cell) const {
    return cells.at(static_cast<std::size_t>(phi_cell) * grid.n_theta_cells + theta_cell);
  }
  double theta_centre(std::uint32_t cell) const noexcept {
    return -std::numbers::pi + 2.0 * std::numbers::pi * (cell + 0.5) / grid.n_theta_cells;
  }
  double phi_centre(std::uint32_t cell) const noexcept {
    return std::numbers::pi * (cell + 0.5) / grid.n_phi_cells;
  }

  /// Largest over smallest cell mean among non-empty cells.
  double max_min_ratio() const noexcept {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& c : cells) {
      if (c.count == 0) continue;
      lo = std::min(lo, c.mean);
      hi = std::max(hi, c.mean);
    }
    return lo > 0.0 && std::isfinite(lo) ? hi / lo : std::numeric_limits<double>::infinity();
  }
};

/// Bins the samples by their exact (theta, phi) cell and reports per-cell
/// mean error. The default domain is 10^6 area-uniform unit-sphere samples.
inline AnisotropyMap anisotropy_map(const BitLayout& layout, PrecisionPolicy policy,
                                    AnisotropyGrid grid,
                                    const SampleDomain& domain = SampleDomain::sphere(1'000'000)) {
  require_samples(domain);
  if (grid.n_theta_cells == 0 || grid.n_phi_cells == 0) {
    throw error(errc::malformed_input, "anisotropy grid needs at least one cell per axis");
  }
  const std::size_t n_cells = static_cast<std::size_t>(grid.n_theta_cells) * grid.n_phi_cells;

  struct Partial {
    std::vector<ErrorAccumulator> cells;
    ErrorAccumulator global;
  };
  auto part = map_chunks<Partial>(
      domain.count,
      [&](std::uint64_t begin, std::uint64_t end) {
        Partial p;
        p.cells.resize(n_cells);
        for (std::uint64_t i = begin; i < end; ++i) {
          const Vec3 v = sample_at(domain, i);
          const double e = sample_error(v, decompress(compress(v, layout, policy), layout), false);
          const SphericalTriple s = to_spherical(v, PrecisionPolicy::all_double());
          const auto tc = std::min<std::uint32_t>(
              grid.n_theta_cells - 1,
              static_cast<std::uint32_t>((s.theta + std::numbers::pi) / (2.0 * std::numbers::pi) *
                                         grid.n_theta_cells));
          const auto pc = std::min<std::uint32_t>(
              grid.n_phi_cells - 1,
              static_cast<std::uint32_t>(s.phi / std::numbers::pi * grid.n_phi_cells));
          p.cells[static_cast<std::size_t>(pc) * grid.n_theta_cells + tc].add(e);
          p.global.add(e);
        }
        return p;
      },
      [&](Partial& total, const Partial& p) {
        if (total.cells.empty()) total.cells.resize(n_cells);
        for (std::size_t c = 0; c < n_cells; ++c) total.cells[c].merge(p.cells[c]);
        total.global.merge(p.global);
      });

  AnisotropyMap map;
  map.grid = grid;
  map.global = part.global.stats(false);
  map.cells.resize(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    const ErrorStats s = part.cells[c].stats(false);
    map.cells[c] = {s.count, s.mean, s.max};
  }
  return map;
}

/// Plot data: one "theta_cell,phi_cell,mean_error" row per cell (cell centres
/// in radians), preceded by a header row.
inline void write_csv(std::ostream& out, const AnisotropyMap& map) {
  out << "theta_cell,phi_cell,mean_error\n";
  char buf[128];
  for (std::uint32_t pc = 0; pc < map.grid.n_phi_cells; ++pc) {
    for (std::uint32_t tc = 0; tc < map.grid.n_theta_cells; ++tc) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", map.theta_centre(tc),
                    map.phi_centre(pc), map.at(tc, pc).mean);
      out << buf;
    }
  }
}

// ---------------------------------------------------------------------------
// Precision policies
// ---------------------------------------------------------------------------

struct PrecisionRow {
  DomainKind domain = DomainKind::unit_sphere;
  PrecisionPolicy policy;
  ErrorStats stats;
};

/// Normalised error for the four (theta, phi) precision pairs on S^2 and on
/// [-1,1]^3, using the count and seed of `domain`. Quantisation runs in
/// `quantisation` precision throughout.
inline std::vector<PrecisionRow> precision_comparison(const SampleDomain& domain,
                                                      const BitLayout& layout,
                                                      Precision quantisation = Precision::f32) {
  std::vector<PrecisionRow> rows;
  for (const DomainKind kind : {DomainKind::unit_sphere, DomainKind::cube}) {
    SampleDomain d = domain;
    d.kind = kind;
    for (const Precision theta : {Precision::f32, Precision::f64}) {
      for (const Precision phi : {Precision::f32, Precision::f64}) {
        const PrecisionPolicy policy{theta, phi, quantisation};
        rows.push_back({kind, policy, error_study(d, layout, policy, true)});
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Bin misses
// ---------------------------------------------------------------------------

struct BinMisses {
  std::uint64_t count = 0;
  std::uint64_t theta_misses = 0;
  std::uint64_t phi_misses = 0;

  double theta_fraction() const noexcept {
    return count ? static_cast<double>(theta_misses) / static_cast<double>(count) : 0.0;
  }
  double phi_fraction() const noexcept {
    return count ? static_cast<double>(phi_misses) / static_cast<double>(count) : 0.0;
  }
};

/// Counts samples whose n_theta / n_phi differ between two pipelines.
inline BinMisses bin_miss_study(const SampleDomain& domain, const BitLayout& layout,
                                PrecisionPolicy candidate, PrecisionPolicy reference) {
  require_samples(domain);
  return map_chunks<BinMisses>(
      domain.count,
      [&](std::uint64_t begin, std::uint64_t end) {
        BinMisses m;
        for (std::uint64_t i = begin; i < end; ++i) {
          const Vec3 v = sample_at(domain, i);
          const auto a = quantize_angles(to_spherical(v, candidate), layout, candidate);
          const auto b = quantize_angles(to_spherical(v, reference), layout, reference);
          ++m.count;
          m.theta_misses += a.n_theta != b.n_theta;
          m.phi_misses += a.n_phi != b.n_phi;
        }
        return m;
      },
      [](BinMisses& total, const BinMisses& p) {
        total.count += p.count;
        total.theta_misses += p.theta_misses;
        total.phi_misses += p.phi_misses;
      });
}

/// Single against double theta/phi intermediates, quantising both in
/// `quantisation` precision.
inline BinMisses bin_miss_study(const SampleDomain& domain, const BitLayout& layout,
                                Precision quantisation = Precision::f64) {
  return bin_miss_study(domain, layout, {Precision::f32, Precision::f32, quantisation},
                        {Precision::f64, Precision::f64, quantisation});
}

// ---------------------------------------------------------------------------
// Idempotence
// ---------------------------------------------------------------------------

struct IdempotenceResult {
  std::uint64_t count = 0;
  std::uint64_t word_misses = 0;         // compress(decompress(w1)) != w1
  std::uint64_t third_cycle_misses = 0;  // compress(decompress(w2)) != w2
  double predicted_bound = 0.0;

  double word_miss_fraction() const noexcept {
    return count ? static_cast<double>(word_misses) / static_cast<double>(count) : 0.0;
  }
  double third_cycle_miss_fraction() const noexcept {
    return count ? static_cast<double>(third_cycle_misses) / static_cast<double>(count) : 0.0;
  }
};

/// Miss-rate bound 2 u 2^(p - m_int): p is the wider angle field and m_int the
/// significand width of the narrowest angle intermediate (24 or 53).
inline double idempotence_bound(const BitLayout& layout, PrecisionPolicy policy,
                                int ulp_budget = 8) {
  const int p = std::max(layout.phi_bits(), layout.theta_bits());
  const bool any_single = policy.theta == Precision::f32 || policy.phi == Precision::f32;
  const int m_int = any_single ? std::numeric_limits<float>::digits
                               : std::numeric_limits<double>::digits;
  return 2.0 * ulp_budget * std::ldexp(1.0, p - m_int);
}

inline IdempotenceResult idempotence_study(const SampleDomain& domain, const BitLayout& layout,
                                           PrecisionPolicy policy, int ulp_budget = 8) {
  require_samples(domain);
  auto r = map_chunks<IdempotenceResult>(
      domain.count,
      [&](std::uint64_t begin, std::uint64_t end) {
        IdempotenceResult p;
        for (std::uint64_t i = begin; i < end; ++i) {
          const CompressedWord w1 = compress(sample_at(domain, i), layout, policy);
          const CompressedWord w2 = compress(decompress(w1, layout), layout, policy);
          const CompressedWord w3 = compress(decompress(w2, layout), layout, policy);
          ++p.count;
          p.word_misses += w2 != w1;
          p.third_cycle_misses += w3 != w2;
        }
        return p;
      },
      [](IdempotenceResult& total, const IdempotenceResult& p) {
        total.count += p.count;
        total.word_misses += p.word_misses;
        total.third_cycle_misses += p.third_cycle_misses;
      });
  r.predicted_bound = idempotence_bound(layout, policy, ulp_budget);
  return r;
}

}  // namespace vc3::analysis
