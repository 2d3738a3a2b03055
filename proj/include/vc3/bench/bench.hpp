// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vc3/analysis/sampling.hpp"
#include "vc3/codec.hpp"

namespace vc3::bench {

// Bytes moved per element: two input streams read, one output written.
inline constexpr std::uint64_t kRawBytesPerElement = 3 * sizeof(Vec3);
inline constexpr std::uint64_t kCompressedBytesPerElement = 3 * sizeof(CompressedWord);

inline void require_same_length(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) {
    throw error(errc::length_mismatch, "stream lengths " + std::to_string(a) + ", " +
                                           std::to_string(b) + ", " + std::to_string(c));
  }
}

/// c = a + b elementwise in single precision.
inline void add_raw(std::span<const Vec3> a, std::span<const Vec3> b, std::span<Vec3> c) {
  require_same_length(a.size(), b.size(), c.size());
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = {a[i].x + b[i].x, a[i].y + b[i].y, a[i].z + b[i].z};
  }
}

inline std::vector<Vec3> add_raw(std::span<const Vec3> a, std::span<const Vec3> b) {
  std::vector<Vec3> c(a.size());
  add_raw(a, b, c);
  return c;
}

/// c_i = compress(decompress(a_i) + decompress(b_i)).
inline void add_compressed(std::span<const CompressedWord> a, std::span<const CompressedWord> b,
                           std::span<CompressedWord> c, const BitLayout& layout,
                           PrecisionPolicy policy) {
  require_same_length(a.size(), b.size(), c.size());
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 u = decompress(a[i], layout);
    const Vec3 v = decompress(b[i], layout);
    c[i] = compress({u.x + v.x, u.y + v.y, u.z + v.z}, layout, policy);
  }
}

inline std::vector<CompressedWord> add_compressed(std::span<const CompressedWord> a,
                                                  std::span<const CompressedWord> b,
                                                  const BitLayout& layout, PrecisionPolicy policy) {
  std::vector<CompressedWord> c(a.size());
  add_compressed(a, b, c, layout, policy);
  return c;
}

// ---------------------------------------------------------------------------
// Platform probes
// ---------------------------------------------------------------------------

/// Size in bytes of the highest-level data or unified cache of cpu0, from
/// sysfs. Empty when not discoverable.
inline std::optional<std::uint64_t> last_level_cache_bytes() {
  namespace fs = std::filesystem;
  const fs::path root = "/sys/devices/system/cpu/cpu0/cache";
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return std::nullopt;
  int best_level = -1;
  std::optional<std::uint64_t> best;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (entry.path().filename().string().rfind("index", 0) != 0) continue;
    std::ifstream level_in(entry.path() / "level");
    std::ifstream type_in(entry.path() / "type");
    std::ifstream size_in(entry.path() / "size");
    int level = 0;
    std::string type, size;
    if (!(level_in >> level) || !(type_in >> type) || !(size_in >> size)) continue;
    if (type == "Instruction" || size.empty()) continue;
    std::uint64_t scale = 1;
    switch (size.back()) {
      case 'K': scale = 1ull << 10; size.pop_back(); break;
      case 'M': scale = 1ull << 20; size.pop_back(); break;
      case 'G': scale = 1ull << 30; size.pop_back(); break;
      default: break;
    }
    try {
      const std::uint64_t bytes = std::stoull(size) * scale;
      if (level > best_level) {
        best_level = level;
        best = bytes;
      }
    } catch (const std::logic_error&) {
    }
  }
  return best;
}

/// MemAvailable from /proc/meminfo in bytes.
inline std::optional<std::uint64_t> available_memory_bytes() {
  std::ifstream in("/proc/meminfo");
  std::string key, unit;
  std::uint64_t value = 0;
  while (in >> key >> value >> unit) {
    if (key == "MemAvailable:") return value * 1024;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct BenchConfig {
  std::uint64_t n = 1u << 20;
  int repeats = 3;
  BitLayout layout;
  PrecisionPolicy policy;
  std::vector<std::uint64_t> working_set_sweep;  // empty: just n
  std::uint64_t seed = 42;
  // Each timed repeat runs the kernel over the whole stream enough times to
  // cover at least this many elements, so cache-resident sizes are measurable.
  std::uint64_t min_raw_elements = 1u << 24;
  std::uint64_t min_compressed_elements = 1u << 20;
  // Sizes whose larger phase would need more than this share of available
  // memory are skipped.
  double memory_fraction = 0.6;
};

struct BenchResult {
  std::uint64_t n = 0;
  std::uint64_t bytes_moved_raw = 0;
  std::uint64_t bytes_moved_compressed = 0;
  double time_raw_ns = 0.0;         // median, one pass over n elements
  double time_compressed_ns = 0.0;  // median, one pass over n elements
  double speedup = 0.0;             // time_raw / time_compressed
  double bytes_ratio = 0.0;         // bytes_moved_raw / bytes_moved_compressed
};

struct SweepReport {
  std::vector<BenchResult> rows;
  std::vector<std::uint64_t> skipped;  // sizes that did not fit in memory
  std::optional<std::uint64_t> llc_bytes;
  std::optional<std::uint64_t> knee;  // largest n with 36 n <= LLC
};

namespace detail {

/// Median over `repeats` timed runs of `passes` calls to fn, optionally after
/// one untimed warm-up call; result is nanoseconds per call.
template <class Fn>
double median_ns(int repeats, std::uint64_t passes, bool warm_up, Fn fn) {
  if (warm_up) fn();
  std::vector<double> t;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t p = 0; p < passes; ++p) fn();
    const auto stop = std::chrono::steady_clock::now();
    t.push_back(std::chrono::duration<double, std::nano>(stop - start).count() /
                static_cast<double>(passes));
  }
  std::sort(t.begin(), t.end());
  return t.size() % 2 ? t[t.size() / 2] : 0.5 * (t[t.size() / 2 - 1] + t[t.size() / 2]);
}

inline std::uint64_t passes_for(std::uint64_t n, std::uint64_t min_elements) {
  return std::max<std::uint64_t>(1, (min_elements + n - 1) / n);
}

// Opaque sink so the optimiser keeps every pass.
template <class T>
void keep(const T& value) {
  asm volatile("" : : "g"(&value) : "memory");
}

}  // namespace detail

/// Times one element count. The raw and compressed phases allocate in turn so
/// peak memory is the raw phase's 36 n bytes.
inline BenchResult bench_one(std::uint64_t n, const BenchConfig& config) {
  const auto domain = analysis::SampleDomain::cube(n, config.seed);
  const auto domain_b = analysis::SampleDomain::cube(n, config.seed + 1);

  // Warming a working set larger than the LLC leaves nothing cached, and the
  // output buffers are already touched, so big sizes skip it.
  const auto llc = last_level_cache_bytes();
  const bool warm_up = !llc || n * kRawBytesPerElement <= *llc;

  BenchResult r;
  r.n = n;
  r.bytes_moved_raw = n * kRawBytesPerElement;
  r.bytes_moved_compressed = n * kCompressedBytesPerElement;
  r.bytes_ratio = static_cast<double>(r.bytes_moved_raw) /
                  static_cast<double>(r.bytes_moved_compressed);
  {
    std::vector<Vec3> a(n), b(n), c(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      a[i] = analysis::sample_at(domain, i);
      b[i] = analysis::sample_at(domain_b, i);
    }
    r.time_raw_ns = detail::median_ns(config.repeats, detail::passes_for(n, config.min_raw_elements), warm_up,
                                      [&] {
                                        add_raw(a, b, c);
                                        detail::keep(c.front());
                                      });
  }
  {
    std::vector<CompressedWord> a(n), b(n), c(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      a[i] = compress(analysis::sample_at(domain, i), config.layout, config.policy);
      b[i] = compress(analysis::sample_at(domain_b, i), config.layout, config.policy);
    }
    r.time_compressed_ns = detail::median_ns(
        config.repeats, detail::passes_for(n, config.min_compressed_elements), warm_up, [&] {
          add_compressed(a, b, c, config.layout, config.policy);
          detail::keep(c.front());
        });
  }
  r.speedup = r.time_raw_ns / r.time_compressed_ns;
  return r;
}

inline SweepReport sweep(const BenchConfig& config) {
  if (config.repeats < 3) throw error(errc::malformed_input, "repeats must be at least 3");
  std::vector<std::uint64_t> sizes = config.working_set_sweep;
  if (sizes.empty()) sizes.push_back(config.n);
  for (const auto n : sizes) {
    if (n == 0) throw error(errc::malformed_input, "element counts must be positive");
  }

  SweepReport report;
  report.llc_bytes = last_level_cache_bytes();
  if (report.llc_bytes) report.knee = *report.llc_bytes / kRawBytesPerElement;
  const auto available = available_memory_bytes();
  for (const auto n : sizes) {
    const double peak = static_cast<double>(n) * static_cast<double>(kRawBytesPerElement);
    if (available && peak > config.memory_fraction * static_cast<double>(*available)) {
      report.skipped.push_back(n);
      continue;
    }
    report.rows.push_back(bench_one(n, config));
  }
  return report;
}

}  // namespace vc3::bench
