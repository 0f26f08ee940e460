// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#pragma once

#include <memory>

#include <Eigen/Dense>

#include "ucpce/instance.hpp"
#include "ucpce/qp.hpp"
#include "ucpce/schedule.hpp"

namespace ucpce {

// Economic dispatch under a fixed (possibly fractional) commitment, with
// quadratically penalized slack on the balance equalities and ramp
// inequalities so the problem stays feasible for every commitment matrix.
//
// Variables: p(i,t), s_bal(t), s_up(i,t), s_dn(i,t) for transitions t -> t+1.
// Rows, in order: balance (equality, one per period), capacity lower and
// upper (one each per unit-period), ramp up and down (one each per
// unit-transition). Commitments enter only through the row bounds, so one
// factorization serves every commitment.
struct DispatchProblem {
  QpProblem qp;
  int n_units = 0;
  int n_periods = 0;
  double rho_bal = 0.0;
  double rho_ramp = 0.0;

  int var_p(int i, int t) const { return t * n_units + i; }
  int var_s_bal(int t) const { return n_units * n_periods + t; }
  int var_s_up(int i, int s) const {
    return n_units * n_periods + n_periods + s * n_units + i;
  }
  int var_s_dn(int i, int s) const {
    return var_s_up(i, s) + n_units * (n_periods - 1);
  }
  int row_balance(int t) const { return t; }
  int row_cap_lo(int i, int t) const { return n_periods + t * n_units + i; }
  int row_cap_hi(int i, int t) const {
    return row_cap_lo(i, t) + n_units * n_periods;
  }
  int row_ramp_up(int i, int s) const {
    return n_periods + 2 * n_units * n_periods + s * n_units + i;
  }
  int row_ramp_dn(int i, int s) const {
    return row_ramp_up(i, s) + n_units * (n_periods - 1);
  }
};

DispatchProblem assemble(const Instance& inst, const SoftSchedule& soft,
                         double rho_bal, double rho_ramp);

struct DispatchSolution {
  QpStatus status = QpStatus::MaxIter;
  Eigen::MatrixXd p;      // N x T
  Eigen::VectorXd s_bal;  // T
  Eigen::MatrixXd s_up;   // N x (T-1)
  Eigen::MatrixXd s_dn;   // N x (T-1)
  double value = 0.0;          // optimal objective incl. slack penalties
  double dispatch_cost = 0.0;  // sum of b*p + c*p^2 only
  int iterations = 0;
  // Row duals, qp sign convention.
  Eigen::VectorXd mu_balance;  // T
  Eigen::MatrixXd mu_cap_lo;   // N x T
  Eigen::MatrixXd mu_cap_hi;   // N x T
  Eigen::MatrixXd mu_ramp_up;  // N x (T-1)
  Eigen::MatrixXd mu_ramp_dn;  // N x (T-1)
};

// Keeps the KKT factorization and last solution across commitment updates.
class DispatchContext {
 public:
  DispatchContext(const Instance& inst, double rho_bal, double rho_ramp,
                  QpSettings qp_settings = {});
  ~DispatchContext();
  DispatchContext(DispatchContext&&) noexcept;

  DispatchSolution solve(const SoftSchedule& soft, bool warm = true);
  const DispatchProblem& problem() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DispatchSolution solve_dispatch(const Instance& inst, const SoftSchedule& soft,
                                double rho_bal, double rho_ramp);

// d(value)/d(commitment): duals of every row whose bound moves with y(i,t),
// weighted by the bound coefficients. Zero wherever no such row is active.
Eigen::MatrixXd grad_value_wrt_commitments(const Instance& inst,
                                           const DispatchProblem& problem,
                                           const DispatchSolution& sol);

// Dispatch for a hard commitment with the slack variables removed: balance
// becomes a strict equality and ramp rows are strict inequalities, so the QP
// is infeasible exactly when the committed fleet cannot serve the load.
struct HardDispatchResult {
  QpStatus status = QpStatus::MaxIter;
  Eigen::MatrixXd p;  // N x T
  double cost = 0.0;  // sum of b*p + c*p^2
  int iterations = 0;
};

class HardDispatchContext {
 public:
  explicit HardDispatchContext(const Instance& inst, QpSettings qp_settings = {});
  ~HardDispatchContext();
  HardDispatchContext(HardDispatchContext&&) noexcept;

  HardDispatchResult solve(const BinarySchedule& hard, bool warm = true);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Full operating cost including the per-period commitment charges.
double total_cost(const Instance& inst, const BinarySchedule& y,
                  const Eigen::MatrixXd& p);
double total_cost(const Instance& inst, const SoftSchedule& y,
                  const Eigen::MatrixXd& p);

}  // namespace ucpce
