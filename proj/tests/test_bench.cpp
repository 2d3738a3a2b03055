// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "vc3/analysis/studies.hpp"
#include "vc3/bench/bench.hpp"

using namespace vc3;
using namespace vc3::bench;

TEST(AddRaw, Examples) {
  const std::vector<Vec3> a = {{1, 2, 3}}, b = {{4, 5, 6}};
  EXPECT_EQ(add_raw(a, b), (std::vector<Vec3>{{5, 7, 9}}));
  const std::vector<Vec3> zero(1);
  EXPECT_EQ(add_raw(a, zero), a);
}

TEST(AddRaw, Commutative) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<float> d(-1e3f, 1e3f);
  std::vector<Vec3> a(10000), b(10000);
  for (auto& v : a) v = {d(gen), d(gen), d(gen)};
  for (auto& v : b) v = {d(gen), d(gen), d(gen)};
  EXPECT_EQ(add_raw(a, b), add_raw(b, a));
}

TEST(AddRaw, LengthMismatch) {
  const std::vector<Vec3> a(3), b(4);
  try {
    add_raw(a, b);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::length_mismatch);
  }
  const std::vector<CompressedWord> wa(3), wb(2);
  EXPECT_THROW(add_compressed(wa, wb, {}, {}), error);
}

TEST(AddCompressed, AddingZeroStaysWithinTwoRoundTrips) {
  const auto d = analysis::SampleDomain::shell(0.1, 10, 20000, 3);
  std::vector<CompressedWord> a, zero(d.count, compress({0, 0, 0}));
  std::vector<Vec3> vs;
  for (std::uint64_t i = 0; i < d.count; ++i) {
    vs.push_back(analysis::sample_at(d, i));
    a.push_back(compress(vs.back()));
  }
  const auto c = add_compressed(a, zero, {}, {});
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double single = analysis::distance(vs[i], decompress(a[i]));
    const double twice = analysis::distance(vs[i], decompress(c[i]));
    const double envelope = norm(predict_error(to_spherical(vs[i], PrecisionPolicy::all_double()), {})) +
                            analysis::norm(vs[i]) * 0x1p-22;
    ASSERT_LE(twice, std::max(2.0 * single, 4.0 * envelope)) << i;
  }
}

TEST(AddCompressed, SumErrorWithinStageBounds) {
  const auto da = analysis::SampleDomain::cube(20000, 4);
  const auto db = analysis::SampleDomain::cube(20000, 5);
  std::vector<CompressedWord> a, b;
  std::vector<Vec3> va, vb;
  for (std::uint64_t i = 0; i < da.count; ++i) {
    va.push_back(analysis::sample_at(da, i));
    vb.push_back(analysis::sample_at(db, i));
    a.push_back(compress(va.back()));
    b.push_back(compress(vb.back()));
  }
  const auto c = add_compressed(a, b, {}, {});
  for (std::size_t i = 0; i < va.size(); ++i) {
    const Vec3 exact{va[i].x + vb[i].x, va[i].y + vb[i].y, va[i].z + vb[i].z};
    const double bound = 3e-4 * (analysis::norm(va[i]) + analysis::norm(vb[i]) + analysis::norm(exact));
    ASSERT_LE(analysis::distance(exact, decompress(c[i])), bound) << i;
  }
}

TEST(AddCompressed, KernelMatchesScalarReference) {
  const auto da = analysis::SampleDomain::cube(50000, 6);
  const auto db = analysis::SampleDomain::sphere(50000, 7);
  for (const auto policy : {PrecisionPolicy::recommended(), PrecisionPolicy::all_single()}) {
    std::vector<CompressedWord> a, b;
    for (std::uint64_t i = 0; i < da.count; ++i) {
      a.push_back(compress(analysis::sample_at(da, i), {}, policy));
      b.push_back(compress(analysis::sample_at(db, i), {}, policy));
    }
    std::vector<CompressedWord> timed(a.size());
    add_compressed(a, b, timed, {}, policy);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Vec3 u = decompress(a[i]);
      const Vec3 v = decompress(b[i]);
      ASSERT_EQ(timed[i], compress(Vec3{u.x + v.x, u.y + v.y, u.z + v.z}, {}, policy));
    }
  }
}

TEST(Sweep, BytesRatioIsExactlyOneAndAHalf) {
  BenchConfig config;
  config.working_set_sweep = {1, 17, 1000, 4096};
  config.min_raw_elements = 1 << 12;
  config.min_compressed_elements = 1 << 10;
  const auto report = sweep(config);
  ASSERT_EQ(report.rows.size(), 4u);
  for (const auto& r : report.rows) {
    EXPECT_EQ(r.bytes_ratio, 1.5);
    EXPECT_EQ(r.bytes_moved_raw, 36 * r.n);
    EXPECT_EQ(r.bytes_moved_compressed, 24 * r.n);
    EXPECT_GT(r.time_raw_ns, 0.0);
    EXPECT_GT(r.time_compressed_ns, 0.0);
    EXPECT_DOUBLE_EQ(r.speedup, r.time_raw_ns / r.time_compressed_ns);
  }
  if (report.llc_bytes) {
    ASSERT_TRUE(report.knee.has_value());
    EXPECT_EQ(*report.knee, *report.llc_bytes / 36);
  } else {
    EXPECT_FALSE(report.knee.has_value());
  }
}

TEST(Sweep, RejectsBadConfig) {
  BenchConfig config;
  config.repeats = 2;
  EXPECT_THROW(sweep(config), error);
  config.repeats = 3;
  config.working_set_sweep = {0};
  EXPECT_THROW(sweep(config), error);
}

TEST(Sweep, SkipsSizesBeyondMemory) {
  BenchConfig config;
  config.working_set_sweep = {std::uint64_t{1} << 50};
  const auto report = sweep(config);
  if (available_memory_bytes()) {
    EXPECT_TRUE(report.rows.empty());
    EXPECT_EQ(report.skipped.size(), 1u);
  }
}
