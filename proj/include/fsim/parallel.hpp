// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fsim {

/// Splits [0, n) into fixed-size chunks dealt round-robin to `workers`
/// threads and calls fn(worker, begin, end) for each chunk. Returns after all
/// workers finish; the first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_round_robin(std::size_t n, std::size_t workers, Fn&& fn,
                          std::size_t chunk = 512) {
  workers = std::max<std::size_t>(1, workers);
  const std::size_t num_chunks = (n + chunk - 1) / chunk;
  auto run_worker = [&](std::size_t w) {
    for (std::size_t c = w; c < num_chunks; c += workers) {
      const std::size_t begin = c * chunk;
      fn(w, begin, std::min(n, begin + chunk));
    }
  };
  if (workers == 1 || num_chunks <= 1) {
    if (n > 0) {
      for (std::size_t c = 0; c < num_chunks; ++c) {
        fn(std::size_t{0}, c * chunk, std::min(n, (c + 1) * chunk));
      }
    }
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        run_worker(w);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fsim
