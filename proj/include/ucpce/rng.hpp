// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace ucpce {

// Seeded RNG with explicit double mapping. std::uniform_real_distribution is
// implementation-defined, so results would not be reproducible across
// standard libraries; everything downstream (parameter init, subset draws,
// instance synthesis) goes through this wrapper instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0. Modulo bias is irrelevant at the sizes
  // used here but rejection keeps the draw exact.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = gen_();
    while (v >= limit) v = gen_();
    return v % n;
  }

  // First k entries of a seeded partial Fisher-Yates shuffle of 0..n-1,
  // returned in draw order.
  std::vector<int> sample_indices(int n, int k) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ucpce
