#pragma once

// Partitioned Monte Carlo helpers shared by the simulators.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace csflab::detail {

struct RunningStats {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const RunningStats& o) {
    if (o.count == 0) return;
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double delta = o.mean - mean;
    mean += delta * nb / (na + nb);
    m2 += o.m2 + delta * delta * na * nb / (na + nb);
    count += o.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double stderr_mean() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

inline constexpr std::int64_t kPartitions = 64;

inline std::int64_t partition_size(std::int64_t total, std::int64_t part) {
  return total / kPartitions + (part < total % kPartitions ? 1 : 0);
}

inline std::mt19937_64 partition_rng(std::uint64_t seed, std::int64_t part) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(part)};
  return std::mt19937_64(seq);
}

// Runs body(part) for part in [0, kPartitions) on up to `jobs` threads.
template <class Body>
void for_each_partition(int jobs, const Body& body) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(kPartitions)));
  std::atomic<std::int64_t> next{0};
  const auto worker = [&]() {
    for (std::int64_t part = next++; part < kPartitions; part = next++) body(part);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace csflab::detail
