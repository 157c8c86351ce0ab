// Copyright 2026 The framesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace framesim {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based split of a master seed. Stream `counter` does not depend on how
/// many other streams were derived or in what order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  return splitmix64(splitmix64(master) ^ splitmix64(counter + 0xD1B54A32D192ED03ULL));
}

inline Rng derive_stream(std::uint64_t master, std::uint64_t counter) {
  return Rng(derive_seed(master, counter));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Runs `trials` independent trials, trial i seeded with derive_stream(master, i),
/// across a thread pool. `trial` returns a per-trial count vector of fixed width;
/// the sums are independent of scheduling.
inline std::vector<long long> run_counted_trials(
    long long trials, std::uint64_t master, std::size_t width,
    const std::function<void(long long, Rng&, std::vector<long long>&)>& trial,
    unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<long long>(threads, std::max(1LL, trials)));
  std::vector<std::vector<long long>> partial(threads, std::vector<long long>(width, 0));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&](unsigned t) {
    try {
      for (long long i = t; i < trials; i += threads) {
        Rng rng = derive_stream(master, static_cast<std::uint64_t>(i));
        trial(i, rng, partial[t]);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<long long> total(width, 0);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < width; ++k) total[k] += p[k];
  return total;
}

}  // namespace framesim
