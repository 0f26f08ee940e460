// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ucpce {

enum class Axis : std::uint8_t { X, Y, Z };

// Single-axis Pauli string; support holds strictly increasing qubit indices.
struct PauliString {
  Axis axis = Axis::Z;
  std::vector<int> support;
};

struct Gate {
  enum class Kind : std::uint8_t { Rotation, CZ, CX };
  Kind kind = Kind::Rotation;
  Axis axis = Axis::Y;  // rotation gates only
  int q0 = 0;           // target qubit (rotation) or control (entangler)
  int q1 = 0;           // entangler target
  int param = -1;       // rotation parameter index
};

struct Ansatz {
  int n_qubits = 0;
  int n_params = 0;
  std::vector<Gate> gates;
};

// Alternating Y-rotation / CZ layers. Odd layers entangle (0,1),(2,3),...,
// even layers (1,2),(3,4),...; a trailing rotation layer closes the circuit,
// so n_params = n_qubits * (layers + 1).
Ansatz build_brickwork(int n_qubits, int layers);

// Y+Z rotations per qubit with a CX chain (0,1),(1,2),... per layer and a
// trailing rotation layer: n_params = 2 * n_qubits * (layers + 1).
Ansatz build_efficient_su2(int n_qubits, int layers);

using Statevector = std::vector<std::complex<double>>;

// Exact dense statevector for |0...0> run through the circuit. Qubit q maps
// to bit q of the amplitude index.
Statevector simulate(const Ansatz& ansatz, const Eigen::VectorXd& theta);

// <psi|P|psi> for a same-axis Pauli string; the imaginary residue (below
// 1e-12 in exact arithmetic) is discarded.
double expectation(const Statevector& psi, const PauliString& pauli);

// All expectations at once; strings of equal axis share one basis change.
Eigen::VectorXd expect_all(const Statevector& psi,
                           const std::vector<PauliString>& strings);

// d<P_j>/d theta_m for m in indices via the two-point parameter-shift rule.
// Column order follows `indices`.
Eigen::MatrixXd param_shift_grad(const Ansatz& ansatz, const Eigen::VectorXd& theta,
                                 const std::vector<PauliString>& strings,
                                 const std::vector<int>& indices);

}  // namespace ucpce
