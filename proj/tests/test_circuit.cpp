// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ucpce/circuit.hpp"
#include "ucpce/pce.hpp"
#include "ucpce/rng.hpp"

using namespace ucpce;

namespace {

Eigen::VectorXd random_theta(Rng& rng, int n) {
  Eigen::VectorXd th(n);
  for (int i = 0; i < n; ++i) th(i) = rng.uniform(-M_PI, M_PI);
  return th;
}

double norm_sq(const Statevector& psi) {
  double s = 0.0;
  for (const auto& a : psi) s += std::norm(a);
  return s;
}

}  // namespace

TEST_CASE("brickwork structure") {
  Ansatz a = build_brickwork(2, 1);
  CHECK(a.n_params == 4);
  REQUIRE(a.gates.size() == 5);
  CHECK(a.gates[0].kind == Gate::Kind::Rotation);
  CHECK(a.gates[1].kind == Gate::Kind::Rotation);
  CHECK(a.gates[2].kind == Gate::Kind::CZ);
  CHECK(a.gates[2].q0 == 0);
  CHECK(a.gates[2].q1 == 1);
  CHECK(a.gates[3].kind == Gate::Kind::Rotation);
  CHECK(a.gates[4].kind == Gate::Kind::Rotation);
  for (const auto& g : a.gates)
    if (g.kind == Gate::Kind::Rotation) CHECK(g.axis == Axis::Y);

  CHECK(build_brickwork(4, 6).n_params == 28);

  // Odd layers pair (0,1),(2,3); even layers pair (1,2).
  Ansatz b = build_brickwork(4, 2);
  std::vector<std::pair<int, int>> cz;
  for (const auto& g : b.gates)
    if (g.kind == Gate::Kind::CZ) cz.push_back({g.q0, g.q1});
  REQUIRE(cz.size() == 3);
  CHECK(cz[0] == std::pair<int, int>{0, 1});
  CHECK(cz[1] == std::pair<int, int>{2, 3});
  CHECK(cz[2] == std::pair<int, int>{1, 2});

  CHECK_THROWS_AS(build_brickwork(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_brickwork(1, 1), std::invalid_argument);
}

TEST_CASE("su2-style structure") {
  Ansatz a = build_efficient_su2(2, 1);
  CHECK(a.n_params == 8);
  int rotations = 0, cx = 0;
  for (const auto& g : a.gates) {
    if (g.kind == Gate::Kind::Rotation) ++rotations;
    if (g.kind == Gate::Kind::CX) ++cx;
  }
  CHECK(rotations == 8);
  CHECK(cx == 1);

  CHECK(build_efficient_su2(5, 6).n_params == 70);

  Ansatz b = build_efficient_su2(4, 1);
  std::vector<std::pair<int, int>> chain;
  for (const auto& g : b.gates)
    if (g.kind == Gate::Kind::CX) chain.push_back({g.q0, g.q1});
  REQUIRE(chain.size() == 3);
  CHECK(chain[0] == std::pair<int, int>{0, 1});
  CHECK(chain[1] == std::pair<int, int>{1, 2});
  CHECK(chain[2] == std::pair<int, int>{2, 3});

  // Each layer alternates Y then Z rotations on every qubit.
  CHECK(b.gates[0].axis == Axis::Y);
  CHECK(b.gates[4].axis == Axis::Z);
}

TEST_CASE("simulation basics") {
  Ansatz a = build_brickwork(3, 2);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(a.n_params);
  Statevector psi = simulate(a, zero);
  REQUIRE(psi.size() == 8);
  CHECK(std::abs(psi[0] - std::complex<double>(1.0, 0.0)) < 1e-14);
  for (int i = 1; i < 8; ++i) CHECK(std::abs(psi[i]) < 1e-14);

  Rng rng(1);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::VectorXd th = random_theta(rng, a.n_params);
    CHECK(norm_sq(simulate(a, th)) == doctest::Approx(1.0).epsilon(1e-12));
  }

  Eigen::VectorXd wrong(a.n_params + 1);
  wrong.setZero();
  CHECK_THROWS_AS(simulate(a, wrong), std::invalid_argument);
}

TEST_CASE("single-qubit rotation algebra") {
  // One brickwork rotation pair on 2 qubits, second qubit untouched:
  // qubit 0 sees Y-rotations theta0 then theta2, so <Z_0> = cos(theta0+theta2).
  Ansatz a = build_brickwork(2, 1);
  Rng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd th = Eigen::VectorXd::Zero(4);
    th(0) = rng.uniform(-M_PI, M_PI);
    th(2) = rng.uniform(-M_PI, M_PI);
    Statevector psi = simulate(a, th);
    CHECK(expectation(psi, {Axis::Z, {0}}) ==
          doctest::Approx(std::cos(th(0) + th(2))).epsilon(1e-12));
    CHECK(expectation(psi, {Axis::X, {0}}) ==
          doctest::Approx(std::sin(th(0) + th(2))).epsilon(1e-12));
    CHECK(expectation(psi, {Axis::Z, {1}}) == doctest::Approx(1.0));
  }
}

TEST_CASE("expectations on the all-zeros state") {
  Ansatz a = build_brickwork(4, 1);
  Statevector psi = simulate(a, Eigen::VectorXd::Zero(a.n_params));
  CHECK(expectation(psi, {Axis::Z, {0, 2}}) == doctest::Approx(1.0));
  CHECK(expectation(psi, {Axis::Z, {0, 1, 2, 3}}) == doctest::Approx(1.0));
  CHECK(expectation(psi, {Axis::X, {1}}) == doctest::Approx(0.0));
  CHECK(expectation(psi, {Axis::X, {0, 3}}) == doctest::Approx(0.0));
  CHECK(expectation(psi, {Axis::Y, {2}}) == doctest::Approx(0.0));
}

TEST_CASE("direct and basis-rotated expectation paths agree") {
  // expectation() walks amplitude pairs; expect_all() rotates each axis onto
  // Z and reads diagonal parities. The two derivations are independent, so
  // agreement pins down the phase conventions, odd-size supports included.
  Rng rng(11);
  for (int rep = 0; rep < 8; ++rep) {
    int n_q = 2 + static_cast<int>(rng.below(3));
    int layers = 1 + static_cast<int>(rng.below(3));
    Ansatz a = rep % 2 == 0 ? build_brickwork(n_q, layers)
                            : build_efficient_su2(n_q, layers);
    Statevector psi = simulate(a, random_theta(rng, a.n_params));

    std::vector<PauliString> strings;
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
      for (int k = 1; k <= n_q; ++k) {
        std::vector<int> sup;
        for (int q = 0; q < k; ++q) sup.push_back(q);
        strings.push_back({ax, sup});
      }
      strings.push_back({ax, {n_q - 1}});
    }
    Eigen::VectorXd batch = expect_all(psi, strings);
    REQUIRE(batch.size() == static_cast<Eigen::Index>(strings.size()));
    for (size_t j = 0; j < strings.size(); ++j) {
      double direct = expectation(psi, strings[j]);
      CHECK(batch(j) == doctest::Approx(direct).epsilon(1e-11));
      CHECK(direct >= -1.0 - 1e-12);
      CHECK(direct <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("parameter shift matches analytic single-qubit derivative") {
  Ansatz a = build_brickwork(2, 1);
  std::vector<PauliString> obs = {{Axis::Z, {0}}};
  for (double t0 : {0.0, M_PI / 2}) {
    Eigen::VectorXd th = Eigen::VectorXd::Zero(4);
    th(0) = t0;
    Eigen::MatrixXd g = param_shift_grad(a, th, obs, {0});
    CHECK(g(0, 0) == doctest::Approx(-std::sin(t0)).epsilon(1e-12));
  }
}

TEST_CASE("parameter shift equals finite differences on random circuits") {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    int n_q = 2 + static_cast<int>(rng.below(3));
    int layers = 1 + static_cast<int>(rng.below(3));
    Ansatz a = rep % 2 == 0 ? build_brickwork(n_q, layers)
                            : build_efficient_su2(n_q, layers);
    Eigen::VectorXd th = random_theta(rng, a.n_params);

    int k = n_q >= 2 ? 2 : 1;
    CorrelatorMap map =
        build_correlators(n_q, k, 1, static_cast<int>(correlator_capacity(n_q, k)));
    std::vector<int> all(a.n_params);
    for (int m = 0; m < a.n_params; ++m) all[m] = m;
    Eigen::MatrixXd ps = param_shift_grad(a, th, map.strings, all);

    const double h = 1e-5;
    for (int m = 0; m < a.n_params; ++m) {
      Eigen::VectorXd up = th, dn = th;
      up(m) += h;
      dn(m) -= h;
      Eigen::VectorXd eu = expect_all(simulate(a, up), map.strings);
      Eigen::VectorXd ed = expect_all(simulate(a, dn), map.strings);
      for (Eigen::Index j = 0; j < eu.size(); ++j) {
        double fd = (eu(j) - ed(j)) / (2.0 * h);
        CHECK(std::abs(ps(j, m) - fd) <= 1e-6);
      }
    }
  }
}

TEST_CASE("parameter shift honors the requested column subset") {
  Ansatz a = build_efficient_su2(3, 2);
  Rng rng(5);
  Eigen::VectorXd th = random_theta(rng, a.n_params);
  std::vector<PauliString> obs = {{Axis::Z, {0, 1}}, {Axis::X, {2}}};
  std::vector<int> subset = {4, 0, 11};
  Eigen::MatrixXd g = param_shift_grad(a, th, obs, subset);
  REQUIRE(g.rows() == 2);
  REQUIRE(g.cols() == 3);
  std::vector<int> all(a.n_params);
  for (int m = 0; m < a.n_params; ++m) all[m] = m;
  Eigen::MatrixXd full = param_shift_grad(a, th, obs, all);
  CHECK(g(0, 0) == full(0, 4));
  CHECK(g(1, 1) == full(1, 0));
  CHECK(g(0, 2) == full(0, 11));
}

TEST_CASE("expectation is periodic in each parameter") {
  Ansatz a = build_brickwork(3, 1);
  Rng rng(9);
  Eigen::VectorXd th = random_theta(rng, a.n_params);
  PauliString obs{Axis::Y, {0, 2}};
  double base = expectation(simulate(a, th), obs);
  for (int m = 0; m < a.n_params; ++m) {
    Eigen::VectorXd shifted = th;
    shifted(m) += 2.0 * M_PI;
    CHECK(expectation(simulate(a, shifted), obs) ==
          doctest::Approx(base).epsilon(1e-10));
  }
}
