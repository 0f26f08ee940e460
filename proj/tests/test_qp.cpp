// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "ucpce/qp.hpp"
#include "ucpce/rng.hpp"

using namespace ucpce;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QpProblem scalar_box(double plo, double phi) {
  // min (x - 3)^2 = x^2 - 6x + 9, dropping the constant.
  QpProblem p;
  p.P.resize(1, 1);
  p.P.insert(0, 0) = 2.0;
  p.q.resize(1);
  p.q << -6.0;
  p.A.resize(1, 1);
  p.A.insert(0, 0) = 1.0;
  p.l.resize(1);
  p.u.resize(1);
  p.l << plo;
  p.u << phi;
  return p;
}

}  // namespace

TEST_CASE("interior optimum leaves the dual at zero") {
  QpSolution s = solve_qp(scalar_box(0.0, 10.0));
  REQUIRE(s.status == QpStatus::Solved);
  CHECK(s.x(0) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(std::abs(s.y(0)) <= 1e-6);
  CHECK(s.objective == doctest::Approx(3.0 * 3.0 - 6.0 * 3.0).epsilon(1e-6));
}

TEST_CASE("active upper bound carries a positive dual") {
  QpSolution s = solve_qp(scalar_box(0.0, 2.0));
  REQUIRE(s.status == QpStatus::Solved);
  CHECK(s.x(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(s.y(0) == doctest::Approx(2.0).epsilon(1e-6));
  // Objective reported by the solver equals direct evaluation.
  double direct = 0.5 * s.x(0) * 2.0 * s.x(0) - 6.0 * s.x(0);
  CHECK(s.objective == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("active lower bound carries a negative dual") {
  QpSolution s = solve_qp(scalar_box(5.0, 10.0));
  REQUIRE(s.status == QpStatus::Solved);
  CHECK(s.x(0) == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(s.y(0) == doctest::Approx(-4.0).epsilon(1e-6));
}

TEST_CASE("single equality row") {
  // min 1/2 x^2 s.t. x = 1: stationarity x + y = 0 gives y = -1.
  QpProblem p;
  p.P.resize(1, 1);
  p.P.insert(0, 0) = 1.0;
  p.q = Eigen::VectorXd::Zero(1);
  p.A.resize(1, 1);
  p.A.insert(0, 0) = 1.0;
  p.l = Eigen::VectorXd::Constant(1, 1.0);
  p.u = Eigen::VectorXd::Constant(1, 1.0);
  QpSolution s = solve_qp(p);
  REQUIRE(s.status == QpStatus::Solved);
  CHECK(s.x(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.y(0) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("zero problem with free rows") {
  QpProblem p;
  p.P.resize(2, 2);
  p.q = Eigen::VectorXd::Zero(2);
  p.A.resize(1, 2);
  p.A.insert(0, 0) = 1.0;
  p.A.insert(0, 1) = -1.0;
  p.l = Eigen::VectorXd::Constant(1, -kInf);
  p.u = Eigen::VectorXd::Constant(1, kInf);
  QpSolution s = solve_qp(p);
  REQUIRE(s.status == QpStatus::Solved);
  CHECK(s.x.norm() <= 1e-8);
  CHECK(s.y.norm() <= 1e-8);
  KktResiduals r = kkt_residuals(p, s);
  CHECK(r.primal <= 1e-12);
  CHECK(r.dual <= 1e-12);
  CHECK(r.comp <= 1e-12);
}

TEST_CASE("random equality QPs match the dense KKT oracle") {
  Rng rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 2 + static_cast<int>(rng.below(7));
    int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    auto c = oracles::random_equality_qp(rng, n, m);
    auto oracle = oracles::solve_equality_qp_dense(c.P, c.q, c.A, c.b);
    QpSolution s = solve_qp(oracles::to_sparse_equality(c));
    REQUIRE(s.status == QpStatus::Solved);
    for (int i = 0; i < n; ++i) CHECK(std::abs(s.x(i) - oracle.x(i)) <= 1e-6);
    for (int j = 0; j < m; ++j) CHECK(std::abs(s.y(j) - oracle.y(j)) <= 1e-6);
  }
}

TEST_CASE("box-constrained random QPs satisfy KKT conditions") {
  Rng rng(202);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 2 + static_cast<int>(rng.below(5));
    QpProblem p;
    p.P = oracles::random_psd(rng, n, 0.5).sparseView();
    p.q = oracles::random_vector(rng, n, -2.0, 2.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    p.A = a.sparseView();
    p.l = oracles::random_vector(rng, n, -1.0, 0.0);
    p.u = oracles::random_vector(rng, n, 0.1, 1.0);
    QpSolution s = solve_qp(p);
    REQUIRE(s.status == QpStatus::Solved);
    KktResiduals r = kkt_residuals(p, s);
    CHECK(r.primal <= 1e-6);
    CHECK(r.dual <= 1e-6);
    CHECK(r.comp <= 1e-5);
    // No feasible point sampled at random beats the reported optimum.
    Eigen::MatrixXd pd = Eigen::MatrixXd(p.P);
    for (int probe = 0; probe < 50; ++probe) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x(i) = rng.uniform(p.l(i), p.u(i));
      double obj = 0.5 * x.dot(pd * x) + p.q.dot(x);
      CHECK(obj >= s.objective - 1e-7);
    }
  }
}

TEST_CASE("perturbing the primal inflates the dual residual") {
  QpProblem p = scalar_box(0.0, 10.0);
  QpSolution s = solve_qp(p);
  REQUIRE(s.status == QpStatus::Solved);
  QpSolution bumped = s;
  bumped.x(0) += 1.0;
  KktResiduals r = kkt_residuals(p, bumped);
  CHECK(r.dual >= 1.0);  // P scales the unit perturbation by 2
}

TEST_CASE("warm start on the identical problem converges immediately") {
  Rng rng(303);
  auto c = oracles::random_equality_qp(rng, 6, 3);
  QpSolver solver(oracles::to_sparse_equality(c));
  QpSolution first = solver.solve();
  REQUIRE(first.status == QpStatus::Solved);
  QpSolution again = solver.solve_warm(first.x, first.y);
  REQUIRE(again.status == QpStatus::Solved);
  CHECK(again.iterations <= 5);
  CHECK((again.x - first.x).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("bound updates reuse the factorization") {
  QpProblem p = scalar_box(0.0, 2.0);
  QpSolver solver(p);
  QpSolution s1 = solver.solve();
  REQUIRE(s1.status == QpStatus::Solved);
  CHECK(s1.x(0) == doctest::Approx(2.0).epsilon(1e-8));

  Eigen::VectorXd l(1), u(1);
  l << 0.0;
  u << 2.5;
  solver.update_bounds(l, u);
  QpSolution s2 = solver.solve_warm(s1.x, s1.y);
  REQUIRE(s2.status == QpStatus::Solved);
  CHECK(s2.x(0) == doctest::Approx(2.5).epsilon(1e-7));

  // Fresh solver on the updated bounds agrees.
  QpProblem p2 = scalar_box(0.0, 2.5);
  QpSolution fresh = solve_qp(p2);
  CHECK(std::abs(s2.x(0) - fresh.x(0)) <= 1e-7);
}

TEST_CASE("contradictory bounds are rejected up front") {
  QpProblem p = scalar_box(3.0, 1.0);
  QpSolution s = solve_qp(p);
  CHECK(s.status == QpStatus::InfeasibleDetected);
}

TEST_CASE("conflicting rows produce an infeasibility certificate") {
  // x = 0 and x = 1 simultaneously; per-row bounds are consistent so the
  // rejection must come from the dual direction test, not the up-front scan.
  QpProblem p;
  p.P.resize(1, 1);
  p.q = Eigen::VectorXd::Zero(1);
  p.A.resize(2, 1);
  p.A.insert(0, 0) = 1.0;
  p.A.insert(1, 0) = 1.0;
  p.l.resize(2);
  p.u.resize(2);
  p.l << 0.0, 1.0;
  p.u << 0.0, 1.0;
  QpSolution s = solve_qp(p);
  CHECK(s.status == QpStatus::InfeasibleDetected);
  CHECK(s.iterations < 4000);
}

TEST_CASE("dimension mismatches are rejected") {
  QpProblem p = scalar_box(0.0, 1.0);
  p.q.resize(2);
  p.q.setZero();
  CHECK_THROWS_AS(QpSolver{p}, std::invalid_argument);

  QpProblem p2 = scalar_box(0.0, 1.0);
  p2.l.resize(2);
  p2.l.setZero();
  CHECK_THROWS_AS(QpSolver{p2}, std::invalid_argument);
}
