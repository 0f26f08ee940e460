// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

// Shared test oracles: dense KKT solves, finite differences, and random
// problem generators. Everything here is independent of the library's own
// solver internals so the two can disagree when one of them is wrong.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ucpce/instance.hpp"
#include "ucpce/qp.hpp"
#include "ucpce/rng.hpp"

namespace oracles {

// Solves min 1/2 x'Px + q'x s.t. Ax = b by a dense factorization of the
// stationarity system [P A'; A 0] [x; y] = [-q; b]. Duals use the same
// convention as the iterative solver: Px + q + A'y = 0.
struct DenseKktResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

inline DenseKktResult solve_equality_qp_dense(const Eigen::MatrixXd& P,
                                              const Eigen::VectorXd& q,
                                              const Eigen::MatrixXd& A,
                                              const Eigen::VectorXd& b) {
  const auto n = P.rows();
  const auto m = A.rows();
  Eigen::MatrixXd kkt(n + m, n + m);
  kkt.setZero();
  kkt.topLeftCorner(n, n) = P;
  kkt.topRightCorner(n, m) = A.transpose();
  kkt.bottomLeftCorner(m, n) = A;
  Eigen::VectorXd rhs(n + m);
  rhs.head(n) = -q;
  rhs.tail(m) = b;
  Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
  return {sol.head(n), sol.tail(m)};
}

// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Random dense PSD matrix L*L' + d*I with entries of order one.
inline Eigen::MatrixXd random_psd(ucpce::Rng& rng, int n, double ridge) {
  Eigen::MatrixXd l(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) l(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::MatrixXd p = l * l.transpose();
  p.diagonal().array() += ridge;
  return p;
}

inline Eigen::VectorXd random_vector(ucpce::Rng& rng, int n, double lo,
                                     double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

// Equality-constrained QP with a full-row-rank A, kept dense for the oracle
// and converted to the sparse l == u form for the solver under test.
struct EqualityQpCase {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

inline EqualityQpCase random_equality_qp(ucpce::Rng& rng, int n, int m) {
  EqualityQpCase c;
  c.P = random_psd(rng, n, 1.0);
  c.q = random_vector(rng, n, -1.0, 1.0);
  c.A = Eigen::MatrixXd(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) c.A(i, j) = rng.uniform(-1.0, 1.0);
  c.b = random_vector(rng, m, -1.0, 1.0);
  return c;
}

inline ucpce::QpProblem to_sparse_equality(const EqualityQpCase& c) {
  ucpce::QpProblem p;
  p.P = c.P.sparseView();
  p.q = c.q;
  p.A = c.A.sparseView();
  p.l = c.b;
  p.u = c.b;
  return p;
}

// Small random-but-valid instances at order-one scale. Keeping the data near
// unit magnitude lets finite-difference oracles reach tight absolute
// tolerances that are unreachable at megawatt scale.
inline ucpce::Instance random_toy_instance(ucpce::Rng& rng, int n_units,
                                           int n_periods) {
  ucpce::Instance inst;
  inst.name = "toy";
  for (int i = 0; i < n_units; ++i) {
    ucpce::Unit u;
    u.p_min = rng.uniform(0.1, 0.4);
    u.p_max = u.p_min + rng.uniform(0.8, 1.6);
    u.a = rng.uniform(0.2, 1.0);
    u.b = rng.uniform(0.5, 2.0);
    u.c = rng.uniform(0.05, 0.3);
    u.r_up = rng.uniform(0.3, 0.9);
    u.r_dn = rng.uniform(0.3, 0.9);
    inst.units.push_back(u);
  }
  double cap = 0.0;
  for (const auto& u : inst.units) cap += u.p_max;
  for (int t = 0; t < n_periods; ++t) {
    inst.loads.push_back(rng.uniform(0.3 * cap, 0.7 * cap));
    inst.reserves.push_back(rng.uniform(0.01 * cap, 0.05 * cap));
  }
  ucpce::validate(inst);
  return inst;
}

inline Eigen::MatrixXd random_soft_matrix(ucpce::Rng& rng, int n_units,
                                          int n_periods, double lo,
                                          double hi) {
  Eigen::MatrixXd y(n_units, n_periods);
  for (int i = 0; i < n_units; ++i)
    for (int t = 0; t < n_periods; ++t) y(i, t) = rng.uniform(lo, hi);
  return y;
}

}  // namespace oracles
