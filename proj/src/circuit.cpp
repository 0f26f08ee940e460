// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include "ucpce/circuit.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace ucpce {

namespace {

constexpr int kMaxQubits = 24;  // dense amplitudes; 2^24 is already 256 MiB

void check_shape(int n_qubits, int layers) {
  if (n_qubits < 2 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count out of range: " + std::to_string(n_qubits));
  }
  if (layers < 1) {
    throw std::invalid_argument("layer count must be >= 1");
  }
}

void rotation_layer(Ansatz& a, Axis axis, int& param) {
  for (int q = 0; q < a.n_qubits; ++q) {
    Gate g;
    g.kind = Gate::Kind::Rotation;
    g.axis = axis;
    g.q0 = q;
    g.param = param++;
    a.gates.push_back(g);
  }
}

void apply_ry(Statevector& psi, int q, double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (i & bit) continue;
    const auto a0 = psi[i], a1 = psi[i | bit];
    psi[i] = c * a0 - s * a1;
    psi[i | bit] = s * a0 + c * a1;
  }
}

void apply_rz(Statevector& psi, int q, double theta) {
  const std::complex<double> e0{std::cos(theta / 2), -std::sin(theta / 2)};
  const std::complex<double> e1 = std::conj(e0);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    psi[i] *= (i & bit) ? e1 : e0;
  }
}

void apply_rx(Statevector& psi, int q, double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  const std::complex<double> is{0, -s};
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (i & bit) continue;
    const auto a0 = psi[i], a1 = psi[i | bit];
    psi[i] = c * a0 + is * a1;
    psi[i | bit] = is * a0 + c * a1;
  }
}

void apply_cz(Statevector& psi, int q0, int q1) {
  const std::size_t mask = (std::size_t{1} << q0) | (std::size_t{1} << q1);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if ((i & mask) == mask) psi[i] = -psi[i];
  }
}

void apply_cx(Statevector& psi, int control, int target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(psi[i], psi[i | tbit]);
  }
}

std::size_t support_mask(const PauliString& p) {
  std::size_t mask = 0;
  for (int q : p.support) mask |= std::size_t{1} << q;
  return mask;
}

// In-place single-qubit basis change mapping the named axis onto Z:
// X via H; Y via S-dagger then H.
void rotate_axis_to_z(Statevector& psi, int n_qubits, Axis axis) {
  if (axis == Axis::Z) return;
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  for (int q = 0; q < n_qubits; ++q) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (i & bit) continue;
      auto a0 = psi[i];
      auto a1 = psi[i | bit];
      if (axis == Axis::Y) a1 *= std::complex<double>{0, -1};
      psi[i] = inv_sqrt2 * (a0 + a1);
      psi[i | bit] = inv_sqrt2 * (a0 - a1);
    }
  }
}

double parity_weighted_sum(const std::vector<double>& prob, std::size_t mask) {
  double e = 0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    e += (std::popcount(i & mask) & 1) ? -prob[i] : prob[i];
  }
  return e;
}

}  // namespace

Ansatz build_brickwork(int n_qubits, int layers) {
  check_shape(n_qubits, layers);
  Ansatz a;
  a.n_qubits = n_qubits;
  int param = 0;
  for (int layer = 1; layer <= layers; ++layer) {
    rotation_layer(a, Axis::Y, param);
    const int first = (layer % 2 == 1) ? 0 : 1;
    for (int q = first; q + 1 < n_qubits; q += 2) {
      Gate g;
      g.kind = Gate::Kind::CZ;
      g.q0 = q;
      g.q1 = q + 1;
      a.gates.push_back(g);
    }
  }
  rotation_layer(a, Axis::Y, param);
  a.n_params = param;
  return a;
}

Ansatz build_efficient_su2(int n_qubits, int layers) {
  check_shape(n_qubits, layers);
  Ansatz a;
  a.n_qubits = n_qubits;
  int param = 0;
  for (int layer = 0; layer < layers; ++layer) {
    rotation_layer(a, Axis::Y, param);
    rotation_layer(a, Axis::Z, param);
    for (int q = 0; q + 1 < n_qubits; ++q) {
      Gate g;
      g.kind = Gate::Kind::CX;
      g.q0 = q;
      g.q1 = q + 1;
      a.gates.push_back(g);
    }
  }
  rotation_layer(a, Axis::Y, param);
  rotation_layer(a, Axis::Z, param);
  a.n_params = param;
  return a;
}

Statevector simulate(const Ansatz& ansatz, const Eigen::VectorXd& theta) {
  if (theta.size() != ansatz.n_params) {
    throw std::invalid_argument("parameter vector length " +
                                std::to_string(theta.size()) + " != " +
                                std::to_string(ansatz.n_params));
  }
  Statevector psi(std::size_t{1} << ansatz.n_qubits);
  psi[0] = 1.0;
  for (const Gate& g : ansatz.gates) {
    switch (g.kind) {
      case Gate::Kind::Rotation: {
        const double t = theta[g.param];
        if (g.axis == Axis::Y) apply_ry(psi, g.q0, t);
        else if (g.axis == Axis::Z) apply_rz(psi, g.q0, t);
        else apply_rx(psi, g.q0, t);
        break;
      }
      case Gate::Kind::CZ:
        apply_cz(psi, g.q0, g.q1);
        break;
      case Gate::Kind::CX:
        apply_cx(psi, g.q0, g.q1);
        break;
    }
  }
  return psi;
}

double expectation(const Statevector& psi, const PauliString& pauli) {
  const std::size_t mask = support_mask(pauli);
  std::complex<double> acc = 0;
  switch (pauli.axis) {
    case Axis::Z:
      for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]);
        acc += (std::popcount(i & mask) & 1) ? -p : p;
      }
      break;
    case Axis::X:
      for (std::size_t i = 0; i < psi.size(); ++i) {
        acc += std::conj(psi[i]) * psi[i ^ mask];
      }
      break;
    case Axis::Y: {
      // <b|Y_S|b ^ mask> = (-i)^k (-1)^{popcount(b & mask)} for |S| = k.
      const int k = static_cast<int>(pauli.support.size());
      static const std::complex<double> neg_ipow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
      const std::complex<double> phase = neg_ipow[k & 3];
      for (std::size_t i = 0; i < psi.size(); ++i) {
        const std::complex<double> term =
            std::conj(psi[i]) * phase * psi[i ^ mask];
        acc += (std::popcount(i & mask) & 1) ? -term : term;
      }
      break;
    }
  }
  return acc.real();
}

Eigen::VectorXd expect_all(const Statevector& psi,
                           const std::vector<PauliString>& strings) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(strings.size()));
  const int n_qubits = std::countr_zero(psi.size());
  std::vector<double> prob(psi.size());
  for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
    bool any = false;
    for (const auto& s : strings) any = any || (s.axis == axis);
    if (!any) continue;
    Statevector rotated = psi;
    rotate_axis_to_z(rotated, n_qubits, axis);
    for (std::size_t i = 0; i < rotated.size(); ++i) prob[i] = std::norm(rotated[i]);
    for (std::size_t j = 0; j < strings.size(); ++j) {
      if (strings[j].axis != axis) continue;
      out[static_cast<Eigen::Index>(j)] = parity_weighted_sum(prob, support_mask(strings[j]));
    }
  }
  return out;
}

Eigen::MatrixXd param_shift_grad(const Ansatz& ansatz, const Eigen::VectorXd& theta,
                                 const std::vector<PauliString>& strings,
                                 const std::vector<int>& indices) {
  constexpr double half_pi = 1.57079632679489661923;
  Eigen::MatrixXd grad(static_cast<Eigen::Index>(strings.size()),
                       static_cast<Eigen::Index>(indices.size()));
  Eigen::VectorXd shifted = theta;
  for (std::size_t c = 0; c < indices.size(); ++c) {
    const int m = indices[c];
    if (m < 0 || m >= ansatz.n_params) {
      throw std::invalid_argument("parameter index out of range: " + std::to_string(m));
    }
    shifted[m] = theta[m] + half_pi;
    const Eigen::VectorXd plus = expect_all(simulate(ansatz, shifted), strings);
    shifted[m] = theta[m] - half_pi;
    const Eigen::VectorXd minus = expect_all(simulate(ansatz, shifted), strings);
    shifted[m] = theta[m];
    grad.col(static_cast<Eigen::Index>(c)) = 0.5 * (plus - minus);
  }
  return grad;
}

}  // namespace ucpce
