// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ucpce/circuit.hpp"
#include "ucpce/schedule.hpp"

namespace ucpce {

// Maps correlator j to commitment variable (unit, period) = (j / T, j % T).
// Strings run through the X family first, then Y, then Z, each in
// lexicographic k-subset order, truncated at n_units * n_periods.
struct CorrelatorMap {
  int n_qubits = 0;
  int k = 2;
  int n_units = 0;
  int n_periods = 0;
  std::vector<PauliString> strings;

  int n_vars() const { return n_units * n_periods; }
  int unit_of(int j) const { return j / n_periods; }
  int period_of(int j) const { return j % n_periods; }
};

// 3 * C(n_qubits, k) distinct same-axis k-body strings fit on n_qubits.
long correlator_capacity(int n_qubits, int k);

// Smallest qubit count whose capacity covers n_vars variables.
int select_qubit_count(long n_vars, int k);

CorrelatorMap build_correlators(int n_qubits, int k, int n_units, int n_periods);

// Soft commitments y = (1 + tanh(alpha * e)) / 2, reshaped via the map.
SoftSchedule decode_soft(const Eigen::VectorXd& e, double alpha,
                         const CorrelatorMap& map);

// Elementwise d y_j / d e_j = (alpha / 2) * (1 - tanh^2(alpha * e_j)).
Eigen::VectorXd decode_grad(const Eigen::VectorXd& e, double alpha);

// Threshold at tau; ties (y == tau) commit the unit.
BinarySchedule harden(const SoftSchedule& soft, double tau);

}  // namespace ucpce
