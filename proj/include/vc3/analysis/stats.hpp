// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace vc3::analysis {

struct ErrorStats {
  double mean = 0.0;
  double max = 0.0;
  double stddev = 0.0;  // (N-1) form; 0 for N < 2
  std::uint64_t count = 0;
  bool normalised = false;
};

/// Running mean / sum of squared deviations / max. merge() combines two
/// disjoint partials (Chan et al.); merging in a fixed order gives
/// bit-identical results regardless of how the work was scheduled.
class ErrorAccumulator {
 public:
  void add(double e) noexcept {
    ++count_;
    const double delta = e - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (e - mean_);
    max_ = std::max(max_, e);
  }

  void merge(const ErrorAccumulator& other) noexcept {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    count_ += other.count_;
    max_ = std::max(max_, other.max_);
  }

  std::uint64_t count() const noexcept { return count_; }

  ErrorStats stats(bool normalised) const noexcept {
    ErrorStats s;
    s.count = count_;
    s.mean = mean_;
    s.max = max_;
    s.stddev = count_ > 1 ? std::sqrt(m2_ / static_cast<double>(count_ - 1)) : 0.0;
    s.normalised = normalised;
    return s;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double max_ = 0.0;
};

}  // namespace vc3::analysis
