// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include "ucpce/pce.hpp"

#include <cmath>
#include <stdexcept>

namespace ucpce {

long correlator_capacity(int n_qubits, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (n_qubits < k) return 0;
  // C(n, k) without overflow for the sizes in play.
  long binom = 1;
  for (int i = 1; i <= k; ++i) {
    binom = binom * (n_qubits - k + i) / i;
  }
  return 3 * binom;
}

int select_qubit_count(long n_vars, int k) {
  if (n_vars < 1) throw std::invalid_argument("n_vars must be >= 1");
  int n = k;
  while (correlator_capacity(n, k) < n_vars) ++n;
  return n;
}

CorrelatorMap build_correlators(int n_qubits, int k, int n_units, int n_periods) {
  const long n_vars = static_cast<long>(n_units) * n_periods;
  if (n_vars < 1) throw std::invalid_argument("empty variable grid");
  if (correlator_capacity(n_qubits, k) < n_vars) {
    throw std::invalid_argument("correlator capacity " +
                                std::to_string(correlator_capacity(n_qubits, k)) +
                                " cannot hold " + std::to_string(n_vars) +
                                " variables");
  }
  CorrelatorMap map;
  map.n_qubits = n_qubits;
  map.k = k;
  map.n_units = n_units;
  map.n_periods = n_periods;
  map.strings.reserve(n_vars);

  for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
    // Lexicographic k-subset enumeration: {0..k-1}, then advance the last
    // index that can still move right.
    std::vector<int> subset(k);
    for (int i = 0; i < k; ++i) subset[i] = i;
    while (static_cast<long>(map.strings.size()) < n_vars) {
      map.strings.push_back({axis, subset});
      int pos = k - 1;
      while (pos >= 0 && subset[pos] == n_qubits - k + pos) --pos;
      if (pos < 0) break;
      ++subset[pos];
      for (int i = pos + 1; i < k; ++i) subset[i] = subset[i - 1] + 1;
    }
    if (static_cast<long>(map.strings.size()) == n_vars) break;
  }
  return map;
}

SoftSchedule decode_soft(const Eigen::VectorXd& e, double alpha,
                         const CorrelatorMap& map) {
  if (e.size() != map.n_vars()) {
    throw std::invalid_argument("expectation vector length " +
                                std::to_string(e.size()) + " != " +
                                std::to_string(map.n_vars()));
  }
  SoftSchedule soft;
  soft.y.resize(map.n_units, map.n_periods);
  for (int j = 0; j < map.n_vars(); ++j) {
    soft.y(map.unit_of(j), map.period_of(j)) = 0.5 * (1.0 + std::tanh(alpha * e[j]));
  }
  return soft;
}

Eigen::VectorXd decode_grad(const Eigen::VectorXd& e, double alpha) {
  Eigen::VectorXd g(e.size());
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    const double th = std::tanh(alpha * e[j]);
    g[j] = 0.5 * alpha * (1.0 - th * th);
  }
  return g;
}

BinarySchedule harden(const SoftSchedule& soft, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("threshold must lie strictly inside (0, 1)");
  }
  BinarySchedule hard;
  hard.y.resize(soft.y.rows(), soft.y.cols());
  for (Eigen::Index i = 0; i < soft.y.rows(); ++i) {
    for (Eigen::Index t = 0; t < soft.y.cols(); ++t) {
      hard.y(i, t) = soft.y(i, t) >= tau ? 1 : 0;
    }
  }
  return hard;
}

}  // namespace ucpce
