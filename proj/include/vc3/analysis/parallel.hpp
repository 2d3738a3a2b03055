// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace vc3::analysis {

/// Fixed chunk size: partials always cover the same index ranges, so results
/// do not depend on the thread count.
inline constexpr std::uint64_t kChunkSize = 1u << 16;

inline unsigned worker_count() noexcept {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(begin, end) -> Partial over [0, count) in kChunkSize chunks across
/// worker threads and folds the partials in chunk order with merge(acc, part).
template <class Partial, class Fn, class Merge>
Partial map_chunks(std::uint64_t count, Fn fn, Merge merge, unsigned threads = 0) {
  const std::uint64_t chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<Partial> partials(chunks);
  if (threads == 0) threads = worker_count();
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunks, 1)));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks && !failed; c = next++) {
      try {
        const std::uint64_t begin = c * kChunkSize;
        partials[c] = fn(begin, std::min(count, begin + kChunkSize));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Partial total{};
  for (const auto& p : partials) merge(total, p);
  return total;
}

}  // namespace vc3::analysis
