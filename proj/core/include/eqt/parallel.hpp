#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace eqt {

/// Work is always split into chunks of this many items, independent of the
/// worker count, so reductions see the same partial sums on every run.
inline constexpr std::size_t kChunkSize = 256;

/// 0 means "use the hardware concurrency".
std::size_t resolve_workers(std::size_t requested);

/// Calls body(begin, end) over fixed-size chunks of [0, n). Chunks are handed to
/// up to `workers` threads; the first exception thrown is rethrown.
template <class Body>
void parallel_for_chunks(std::size_t n, std::size_t workers, Body&& body) {
  const std::size_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
  workers = std::min(resolve_workers(workers), std::max<std::size_t>(n_chunks, 1));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      body(c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
    }
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < n_chunks; c += workers) {
        try {
          body(c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise (tree) summation over fixed chunks; result depends only on the data.
double pairwise_sum(std::span<const double> values);

}  // namespace eqt
