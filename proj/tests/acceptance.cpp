// SPDX-License-Identifier: Apache-2.0
// Acceptance checks. Usage: vc3_acceptance <check>|all
// Prints one PASS/FAIL line per criterion and exits non-zero on any FAIL.
// Tolerances are constants in this file; do not loosen them to go green.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "vc3/vc3.hpp"

using namespace vc3;
using namespace vc3::analysis;

namespace {

constexpr std::uint64_t kSamples = 1'000'000;
constexpr std::uint64_t kSeed = 42;
constexpr double kPi = std::numbers::pi;

int failures = 0;

void verdict(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

void info(const std::string& detail) { std::printf("INFO %s\n", detail.c_str()); }

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double rel(double got, double want) { return got / want - 1.0; }

// --- layout error ladder ---------------------------------------------------

void layout_ladder() {
  constexpr double kTol = 0.10;
  struct Rung {
    BitLayout layout;
    double want;
  };
  const Rung rungs[] = {{BitLayout::make(0, 8, 23, 16, 17), 1.55e-5},
                        {BitLayout::make(0, 7, 23, 17, 17), 1.07e-5},
                        {BitLayout::make(0, 7, 22, 17, 18), 7.74e-6}};
  for (const auto& r : rungs) {
    const auto s = error_study(SampleDomain::sphere(kSamples, kSeed), r.layout, PrecisionPolicy::all_double(), false);
    verdict("layout_ladder " + to_string(r.layout), std::fabs(rel(s.mean, r.want)) <= kTol,
            "mean " + g(s.mean) + " vs " + g(r.want) + " (" + g(100 * rel(s.mean, r.want)) + "%, tol 10%)");
    // Same layout with theta and phi each drawn uniformly; reported only.
    const auto a =
        error_study(SampleDomain::sphere_angles(kSamples, kSeed), r.layout, PrecisionPolicy::all_double(), false);
    info("angle-uniform sampler " + to_string(r.layout) + ": mean " + g(a.mean) + " (" +
         g(100 * rel(a.mean, r.want)) + "%)");
  }
}

// --- precision policy table ------------------------------------------------

void precision_table() {
  constexpr double kWant = 8.28e-6, kTol = 0.05;
  constexpr double kDoublePhiMax = 2.0e-5;
  constexpr double kSinglePhiMaxLo = 4e-5, kSinglePhiMaxHi = 9e-5;
  constexpr double kCubeSinglePhiMax = 3.0e-4;
  const auto rows = precision_comparison(SampleDomain::sphere(kSamples, kSeed), BitLayout{});
  for (const auto& row : rows) {
    const std::string tag = std::string(row.domain == DomainKind::cube ? "cube " : "sphere ") +
                            to_string(row.policy);
    const bool single_phi = row.policy.phi == Precision::f32;
    if (row.domain == DomainKind::unit_sphere) {
      verdict("precision_table mean " + tag, std::fabs(rel(row.stats.mean, kWant)) <= kTol,
              g(row.stats.mean) + " vs " + g(kWant) + " (" + g(100 * rel(row.stats.mean, kWant)) + "%, tol 5%)");
      if (single_phi) {
        verdict("precision_table max " + tag,
                row.stats.max >= kSinglePhiMaxLo && row.stats.max <= kSinglePhiMaxHi,
                g(row.stats.max) + " in [4e-5, 9e-5]");
      } else {
        verdict("precision_table max " + tag, row.stats.max <= kDoublePhiMax, g(row.stats.max) + " <= 2e-5");
      }
    } else if (single_phi) {
      verdict("precision_table max " + tag, row.stats.max <= kCubeSinglePhiMax, g(row.stats.max) + " <= 3e-4");
    } else {
      info(tag + ": mean " + g(row.stats.mean) + " max " + g(row.stats.max));
    }
  }
  // The single-phi max comes from the one sample nearest a pole, so it moves
  // by an order of magnitude between seeds. Reported, not tested.
  std::string spread;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto s = error_study(SampleDomain::sphere(kSamples, seed), BitLayout{}, PrecisionPolicy::all_single(), true);
    spread += " " + g(s.max);
  }
  info("sphere single-phi max over seeds 1-8:" + spread);
}

// --- bin misses ----------------------------------------------------------------

void bin_misses() {
  constexpr double kTheta = 0.20, kPhiLo = 0.24, kPhiHi = 0.26, kPp = 0.05;  // percent
  for (const auto& d : {SampleDomain::sphere(kSamples, kSeed), SampleDomain::cube(kSamples, kSeed)}) {
    const auto m = bin_miss_study(d, BitLayout{});
    const double t = 100 * m.theta_fraction(), p = 100 * m.phi_fraction();
    verdict("bin_misses theta " + to_string(d), std::fabs(t - kTheta) <= kPp,
            g(t) + "% vs 0.20 +- 0.05 pp");
    verdict("bin_misses phi " + to_string(d), p >= kPhiLo - kPp && p <= kPhiHi + kPp,
            g(p) + "% vs 0.24-0.26 +- 0.05 pp");
  }
}

// --- fractional split --------------------------------------------------------

void fractional_split() {
  constexpr double kTol = 0.10;
  constexpr int kBits = 35;
  const std::vector<std::uint64_t> buckets = {1u << 16, 81920, 98304, 114688, 1u << 17,
                                              163840,   196608, 229376, 1u << 18};
  const auto rows = split_sweep(kBits, buckets, SampleDomain::sphere(kSamples, kSeed));
  double ref = 0;
  for (const auto& r : rows) {
    if (r.config.n_phi_max() + 1 == (1u << 17)) ref = r.stats.mean;
  }
  double worst = 0;
  for (const auto& r : rows) {
    const double d = rel(r.stats.mean, ref);
    info("split phi_buckets " + std::to_string(r.config.n_phi_max() + 1) + " theta_buckets " +
         std::to_string(r.config.n_theta_max() + 1) + ": mean " + g(r.stats.mean) + " (" + g(100 * d) + "%)");
    worst = std::max(worst, std::fabs(d));
  }
  verdict("fractional_split variation", worst < kTol,
          "max |mean/mean(2^17) - 1| = " + g(100 * worst) + "% (tol < 10%)");

  // Joint encode/decode over every (n_phi, n_theta) pair that fits 8 bits.
  bool exact = true;
  std::uint64_t pairs = 0;
  for (std::uint64_t np = 1; np < 256; ++np) {
    for (std::uint64_t nt = 1; (np + 1) * (nt + 1) <= 256; ++nt) {
      const auto split = SplitConfig::make(8, np, nt);
      for (std::uint64_t a = 0; a <= np; ++a) {
        for (std::uint64_t b = 0; b <= nt; ++b) {
          const QuantizedAngles q{b, a};
          exact &= split.decode(split.encode(q)) == q && split.encode(q) < 256;
          ++pairs;
        }
      }
    }
  }
  verdict("fractional_split exhaustive p=8", exact, std::to_string(pairs) + " joint codes round-trip");
}

// --- companding ----------------------------------------------------------------

void companding() {
  constexpr double kTol = 0.05;
  const auto d = SampleDomain::sphere(kSamples, kSeed);
  const BitLayout l;
  const auto uniform = compand_study(d, l, Compander::uniform(), Compander::uniform());
  const auto tanh = compand_study(d, l, Compander::uniform(), Compander::tanh(0.5));
  const auto cosine = compand_study(d, l, Compander::uniform(), Compander::cosine());
  const double ds = rel(tanh.stddev, uniform.stddev);
  verdict("companding tanh stddev", std::fabs(ds) <= kTol,
          "stddev " + g(tanh.stddev) + " vs uniform " + g(uniform.stddev) + " (" + g(100 * ds) + "%, tol 5%)");
  verdict("companding cosine worse", cosine.mean > uniform.mean,
          "mean " + g(cosine.mean) + " vs uniform " + g(uniform.mean));
}

// --- radius invariance -----------------------------------------------------------

void radius_invariance() {
  constexpr double kTol = 0.05;
  const auto at = [](double r) {
    return error_study(SampleDomain::shell(r, r, kSamples, kSeed), BitLayout{}, PrecisionPolicy::recommended(),
                       true)
        .mean;
  };
  const double ref = at(1.0);
  for (const double r : {1e-8, 1e-4, 1.0, 1e4, 1e8}) {
    const double m = at(r);
    verdict("radius_invariance r=" + g(r), std::fabs(rel(m, ref)) <= kTol,
            "normalised mean " + g(m) + " vs " + g(ref) + " at r=1 (" + g(100 * rel(m, ref)) + "%)");
  }
}

// --- idempotence -------------------------------------------------------------------

void idempotence() {
  constexpr int kUlp = 8;
  constexpr double kThirdCycle = 0.9999;
  const auto d = SampleDomain::cube(kSamples, kSeed);
  for (const auto policy : {PrecisionPolicy::all_single(), PrecisionPolicy::all_double()}) {
    const auto r = idempotence_study(d, BitLayout{}, policy, kUlp);
    verdict("idempotence word misses " + to_string(policy), r.word_miss_fraction() <= r.predicted_bound,
            g(r.word_miss_fraction()) + " <= bound " + g(r.predicted_bound));
    if (policy == PrecisionPolicy::all_double()) {
      const double stable = 1.0 - r.third_cycle_miss_fraction();
      verdict("idempotence third cycle " + to_string(policy), stable >= kThirdCycle,
              g(100 * stable) + "% stable (need >= 99.99%)");
    }
  }
}

// --- bandwidth -----------------------------------------------------------------

void bandwidth() {
  bench::BenchConfig config;
  const auto llc = bench::last_level_cache_bytes();
  const std::uint64_t cache_n = 1u << 14;  // 576 KiB raw working set
  const std::uint64_t big_n = llc ? (8 * *llc + bench::kRawBytesPerElement - 1) / bench::kRawBytesPerElement
                                  : std::uint64_t{1} << 26;
  config.working_set_sweep = {cache_n, 1u << 20, big_n};
  info("llc " + (llc ? std::to_string(*llc) : std::string("unknown")) + " bytes; large n = " +
       std::to_string(big_n));
  const auto start = std::chrono::steady_clock::now();
  const auto report = bench::sweep(config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  constexpr double kBudgetSeconds = 120;
  verdict("bandwidth runtime", seconds < kBudgetSeconds, g(seconds) + " s (budget 120 s)");
  bool ratio_ok = !report.rows.empty();
  for (const auto& r : report.rows) {
    ratio_ok &= r.bytes_ratio == 1.5;
    info("n " + std::to_string(r.n) + ": raw " + g(r.time_raw_ns) + " ns, compressed " +
         g(r.time_compressed_ns) + " ns, speedup " + g(r.speedup));
  }
  verdict("bandwidth bytes ratio", ratio_ok, "bytes_moved_raw / bytes_moved_compressed == 1.5 at every size");
  const auto find = [&](std::uint64_t n) -> const bench::BenchResult* {
    for (const auto& r : report.rows) {
      if (r.n == n) return &r;
    }
    return nullptr;
  };
  const auto* small = find(cache_n);
  const auto* large = find(big_n);
  if (!large) {
    verdict("bandwidth large speedup", false, "n=" + std::to_string(big_n) + " skipped: exceeds memory cap");
    verdict("bandwidth speedup grows", false, "no large-n measurement");
    return;
  }
  verdict("bandwidth large speedup", large->speedup > 1.0,
          "median speedup " + g(large->speedup) + " at n=" + std::to_string(big_n) + " (need > 1)");
  verdict("bandwidth speedup grows", small && large->speedup > small->speedup,
          g(large->speedup) + " at large n vs " + (small ? g(small->speedup) : std::string("?")) +
              " cache-resident");
}

// --- property suites ---------------------------------------------------------

void properties() {
  const BitLayout l;
  {
    bool ok = true;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> th(-kPi, kPi), ph(0.0, kPi);
    for (const auto policy : {PrecisionPolicy::all_single(), PrecisionPolicy::all_double()}) {
      // four ulp of pi in the quantisation precision
      const double slack = policy.quantisation == Precision::f32 ? 4 * 0x1p-22 : 4 * 0x1p-51;
      for (std::uint64_t i = 0; i < kSamples && ok; ++i) {
        const double theta = th(gen), phi = ph(gen);
        const auto a = dequantize_angles(quantize_angles({1, theta, phi}, l, policy), l);
        ok &= std::fabs(theta - a.theta) <= kPi / l.n_theta_max() + slack;
        ok &= std::fabs(phi - a.phi) <= kPi / (2.0 * l.n_phi_max()) + slack;
      }
    }
    verdict("properties quantisation bounds", ok, "1e6 angles per policy within pi/n_theta_max, pi/2n_phi_max");
  }
  {
    bool ok = true;
    double worst = 0;
    const auto d = SampleDomain::shell(1e-6, 1e6, 100'000, kSeed);
    for (std::uint64_t i = 0; i < d.count; ++i) {
      const Vec3 v = sample_at(d, i);
      const auto s = to_spherical(v, PrecisionPolicy::all_double());
      const double envelope = norm(predict_error(s, l)) + s.r * 0x1p-22;
      const double err = distance(v, decompress(compress(v, l), l));
      worst = std::max(worst, err / envelope);
      ok &= err <= 2.0 * envelope;
    }
    verdict("properties error envelope", ok, "1e5 samples, worst error/envelope " + g(worst) + " (limit 2)");
  }
  {
    bool ok = true;
    std::mt19937_64 gen(11);
    for (const auto policy : {PrecisionPolicy::recommended(), PrecisionPolicy::all_double()}) {
      for (int i = 0; i < 100'000; ++i) {
        const std::uint64_t exponent = 40 + gen() % 80;
        const std::uint64_t magnitude = (exponent << 22) | (gen() & ((1u << 22) - 1));
        const Vec3 v = decompress({(magnitude << 35) | (gen() & ((std::uint64_t{1} << 35) - 1))}, l);
        const Vec3 w = decompress(compress(v, l, policy), l);
        ok &= v == w;  // value equality: a pole may swap the sign of a zero component
      }
    }
    verdict("properties node round trip", ok, "2e5 decoded vectors re-encode exactly");
  }
  {
    // At a pole theta is meaningless: every n_theta must decode to within
    // one magnitude ulp of the same point.
    bool ok = true;
    const std::uint32_t magnitude = 80u << 22;
    for (const std::uint64_t n_phi : {std::uint64_t{0}, l.n_phi_max()}) {
      const Vec3 ref = decompress(pack(magnitude, {0, n_phi}, l), l);
      for (std::uint64_t n_theta = 0; n_theta <= l.n_theta_max(); ++n_theta) {
        ok &= distance(decompress(pack(magnitude, {n_theta, n_phi}, l), l), ref) <= 0x1p-22;
      }
    }
    // Near a pole the error is bounded by the phi bucket alone.
    const double bound = kPi / (2.0 * l.n_phi_max()) + 0x1p-21;
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> th(-kPi, kPi);
    for (int i = 0; i < 100'000; ++i) {
      const double t = th(gen), p = 1e-9 * (i % 100);
      const Vec3 v{static_cast<float>(std::sin(p) * std::cos(t)), static_cast<float>(std::sin(p) * std::sin(t)),
                   static_cast<float>(std::cos(p))};
      ok &= distance(v, decompress(compress(v, l), l)) <= bound;
    }
    verdict("properties pole degeneracy", ok, "all n_theta agree at the poles; near-pole error <= " + g(bound));
  }
  {
    bool ok = true;
    std::mt19937_64 gen(17);
    for (int round = 0; round < 20 && ok; ++round) {
      std::vector<CompressedWord> words(round * 997);
      for (auto& w : words) w = {gen()};
      std::ostringstream a;
      io::write_stream(a, l, words);
      std::istringstream in(a.str());
      const auto s = io::read_stream(in);
      std::ostringstream b;
      io::write_stream(b, s.layout, s.words);
      ok &= a.str() == b.str() && a.str().size() == io::kHeaderSize + 8 * words.size();
    }
    verdict("properties file byte identity", ok, "write -> read -> write is byte-identical");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<void()>> checks = {
      {"layout_ladder", layout_ladder},   {"precision_table", precision_table},
      {"bin_misses", bin_misses},         {"fractional_split", fractional_split},
      {"companding", companding},         {"radius_invariance", radius_invariance},
      {"idempotence", idempotence},       {"bandwidth", bandwidth},
      {"properties", properties}};
  const std::string which = argc > 1 ? argv[1] : "all";
  try {
    if (which == "all") {
      for (const auto& [name, fn] : checks) fn();
    } else if (const auto it = checks.find(which); it != checks.end()) {
      it->second();
    } else {
      std::fprintf(stderr, "unknown check '%s'\n", which.c_str());
      return 2;
    }
  } catch (const std::exception& e) {
    std::printf("FAIL %s: exception: %s\n", which.c_str(), e.what());
    return 1;
  }
  return failures ? 1 : 0;
}
