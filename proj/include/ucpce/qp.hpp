// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#pragma once

#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ucpce {

// min 1/2 x'Px + q'x  s.t.  l <= Ax <= u, with P symmetric PSD.
// Equality rows are expressed as l = u; one-sided rows use +-infinity.
struct QpProblem {
  Eigen::SparseMatrix<double> P;
  Eigen::VectorXd q;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd l;
  Eigen::VectorXd u;

  int n() const { return static_cast<int>(q.size()); }
  int m() const { return static_cast<int>(l.size()); }
};

enum class QpStatus { Solved, MaxIter, InfeasibleDetected };

struct QpSettings {
  double rho = 0.1;        // base ADMM penalty; equality rows get 1e3x
  double sigma = 1e-6;     // primal regularization
  double alpha = 1.6;      // relaxation
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iter = 4000;
  int check_interval = 25;  // termination test cadence
  bool scaling = true;
  int scaling_iters = 10;
  // Rebalance rho from the primal/dual residual ratio at each termination
  // test and refactorize when the estimate drifts past the tolerance factor.
  // Dual magnitudes vary over orders of magnitude with the bound pattern, so
  // a fixed step size stalls on some patterns.
  bool adaptive_rho = true;
  double adaptive_rho_tolerance = 5.0;
  // A dual step direction with A'dy ~ 0 and negative bound support certifies
  // primal infeasibility; tested at the same cadence as termination.
  double eps_prim_inf = 1e-4;
  bool polish = true;       // active-set KKT refinement after convergence
  int polish_refine_iters = 5;
  double polish_delta = 1e-7;
};

// Duals satisfy Px + q + A'y = 0 with y >= 0 on active upper bounds and
// y <= 0 on active lower bounds.
struct QpSolution {
  QpStatus status = QpStatus::MaxIter;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;  // Ax at the solution, projected to [l, u]
  int iterations = 0;
  double objective = 0.0;
  bool polished = false;
};

struct KktResiduals {
  double primal = 0.0;  // max bound violation of Ax
  double dual = 0.0;    // || Px + q + A'y ||_inf
  double comp = 0.0;    // max_j min(|y_j|, distance of A_j x to the active bound)
};

KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& sol);

// Reusable solver: the quasi-definite KKT matrix [P + sigma*I, A'; A,
// -diag(1/rho)] is factorized at construction and shared by every solve;
// bound updates never trigger refactorization, rho rebalancing does. Row
// penalties are classified (free / inequality / equality) from the bounds
// seen at setup.
class QpSolver {
 public:
  explicit QpSolver(QpProblem problem, QpSettings settings = {});
  ~QpSolver();
  QpSolver(QpSolver&&) noexcept;
  QpSolver& operator=(QpSolver&&) noexcept;

  void update_bounds(const Eigen::VectorXd& l, const Eigen::VectorXd& u);
  QpSolution solve();
  QpSolution solve_warm(const Eigen::VectorXd& x0, const Eigen::VectorXd& y0);

  const QpProblem& problem() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around QpSolver.
QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings = {});

}  // namespace ucpce
