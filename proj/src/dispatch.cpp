// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include "ucpce/dispatch.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ucpce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_schedule_shape(const Instance& inst, int rows, int cols) {
  if (rows != inst.n_units() || cols != inst.n_periods()) {
    throw std::invalid_argument(
        "schedule shape " + std::to_string(rows) + "x" + std::to_string(cols) +
        " does not match instance " + std::to_string(inst.n_units()) + "x" +
        std::to_string(inst.n_periods()));
  }
}

// Row bounds for a commitment matrix; shared by the slackened and slack-free
// assemblies, which order their rows identically.
void fill_bounds(const Instance& inst, const Eigen::MatrixXd& y,
                 const DispatchProblem& layout, Eigen::VectorXd* l,
                 Eigen::VectorXd* u) {
  const int n = inst.n_units(), t_count = inst.n_periods();
  for (int t = 0; t < t_count; ++t) {
    (*l)[layout.row_balance(t)] = inst.loads[t];
    (*u)[layout.row_balance(t)] = inst.loads[t];
  }
  for (int t = 0; t < t_count; ++t) {
    for (int i = 0; i < n; ++i) {
      const Unit& unit = inst.units[i];
      (*l)[layout.row_cap_lo(i, t)] = unit.p_min * y(i, t);
      (*u)[layout.row_cap_lo(i, t)] = kInf;
      (*l)[layout.row_cap_hi(i, t)] = -kInf;
      (*u)[layout.row_cap_hi(i, t)] = unit.p_max * y(i, t);
    }
  }
  for (int s = 0; s + 1 < t_count; ++s) {
    for (int i = 0; i < n; ++i) {
      const Unit& unit = inst.units[i];
      const double y0 = y(i, s), y1 = y(i, s + 1);
      (*l)[layout.row_ramp_up(i, s)] = -kInf;
      (*u)[layout.row_ramp_up(i, s)] =
          unit.r_up * y0 + unit.p_min * (y1 - y0) + unit.p_max * (1.0 - y1);
      (*l)[layout.row_ramp_dn(i, s)] = -kInf;
      (*u)[layout.row_ramp_dn(i, s)] =
          unit.r_dn * y1 + unit.p_min * (y0 - y1) + unit.p_max * (1.0 - y0);
    }
  }
}

double quadratic_cost(const Instance& inst, const Eigen::MatrixXd& p) {
  double cost = 0.0;
  for (int t = 0; t < inst.n_periods(); ++t) {
    for (int i = 0; i < inst.n_units(); ++i) {
      const Unit& u = inst.units[i];
      cost += u.b * p(i, t) + u.c * p(i, t) * p(i, t);
    }
  }
  return cost;
}

}  // namespace

DispatchProblem assemble(const Instance& inst, const SoftSchedule& soft,
                         double rho_bal, double rho_ramp) {
  validate(inst);
  check_schedule_shape(inst, soft.n_units(), soft.n_periods());
  if (!(rho_bal > 0) || !(rho_ramp > 0)) {
    throw std::invalid_argument("slack penalties must be positive");
  }
  DispatchProblem prob;
  prob.n_units = inst.n_units();
  prob.n_periods = inst.n_periods();
  prob.rho_bal = rho_bal;
  prob.rho_ramp = rho_ramp;
  const int n_units = prob.n_units, t_count = prob.n_periods;
  const int n_transitions = n_units * (t_count - 1);
  const int n_vars = n_units * t_count + t_count + 2 * n_transitions;
  const int n_rows = t_count + 2 * n_units * t_count + 2 * n_transitions;

  std::vector<Eigen::Triplet<double>> p_trip, a_trip;
  prob.qp.q = Eigen::VectorXd::Zero(n_vars);
  for (int t = 0; t < t_count; ++t) {
    for (int i = 0; i < n_units; ++i) {
      p_trip.emplace_back(prob.var_p(i, t), prob.var_p(i, t), 2.0 * inst.units[i].c);
      prob.qp.q[prob.var_p(i, t)] = inst.units[i].b;
    }
    p_trip.emplace_back(prob.var_s_bal(t), prob.var_s_bal(t), 2.0 * rho_bal);
  }
  for (int s = 0; s + 1 < t_count; ++s) {
    for (int i = 0; i < n_units; ++i) {
      p_trip.emplace_back(prob.var_s_up(i, s), prob.var_s_up(i, s), 2.0 * rho_ramp);
      p_trip.emplace_back(prob.var_s_dn(i, s), prob.var_s_dn(i, s), 2.0 * rho_ramp);
    }
  }

  for (int t = 0; t < t_count; ++t) {
    for (int i = 0; i < n_units; ++i) {
      a_trip.emplace_back(prob.row_balance(t), prob.var_p(i, t), 1.0);
    }
    a_trip.emplace_back(prob.row_balance(t), prob.var_s_bal(t), 1.0);
  }
  for (int t = 0; t < t_count; ++t) {
    for (int i = 0; i < n_units; ++i) {
      a_trip.emplace_back(prob.row_cap_lo(i, t), prob.var_p(i, t), 1.0);
      a_trip.emplace_back(prob.row_cap_hi(i, t), prob.var_p(i, t), 1.0);
    }
  }
  for (int s = 0; s + 1 < t_count; ++s) {
    for (int i = 0; i < n_units; ++i) {
      a_trip.emplace_back(prob.row_ramp_up(i, s), prob.var_p(i, s + 1), 1.0);
      a_trip.emplace_back(prob.row_ramp_up(i, s), prob.var_p(i, s), -1.0);
      a_trip.emplace_back(prob.row_ramp_up(i, s), prob.var_s_up(i, s), -1.0);
      a_trip.emplace_back(prob.row_ramp_dn(i, s), prob.var_p(i, s), 1.0);
      a_trip.emplace_back(prob.row_ramp_dn(i, s), prob.var_p(i, s + 1), -1.0);
      a_trip.emplace_back(prob.row_ramp_dn(i, s), prob.var_s_dn(i, s), -1.0);
    }
  }

  prob.qp.P.resize(n_vars, n_vars);
  prob.qp.P.setFromTriplets(p_trip.begin(), p_trip.end());
  prob.qp.A.resize(n_rows, n_vars);
  prob.qp.A.setFromTriplets(a_trip.begin(), a_trip.end());
  prob.qp.l.resize(n_rows);
  prob.qp.u.resize(n_rows);
  fill_bounds(inst, soft.y, prob, &prob.qp.l, &prob.qp.u);
  return prob;
}

struct DispatchContext::Impl {
  Instance inst;
  DispatchProblem prob;
  QpSolver solver;
  QpSolution last;
  bool have_last = false;

  Impl(const Instance& instance, double rho_bal, double rho_ramp,
       const QpSettings& settings)
      : inst(instance),
        prob(assemble(instance,
                      SoftSchedule{Eigen::MatrixXd::Constant(
                          instance.n_units(), instance.n_periods(), 0.5)},
                      rho_bal, rho_ramp)),
        solver(prob.qp, settings) {}
};

DispatchContext::DispatchContext(const Instance& inst, double rho_bal,
                                 double rho_ramp, QpSettings qp_settings)
    : impl_(std::make_unique<Impl>(inst, rho_bal, rho_ramp, qp_settings)) {}
DispatchContext::~DispatchContext() = default;
DispatchContext::DispatchContext(DispatchContext&&) noexcept = default;

const DispatchProblem& DispatchContext::problem() const { return impl_->prob; }

DispatchSolution DispatchContext::solve(const SoftSchedule& soft, bool warm) {
  const Instance& inst = impl_->inst;
  check_schedule_shape(inst, soft.n_units(), soft.n_periods());
  DispatchProblem& prob = impl_->prob;
  Eigen::VectorXd l(prob.qp.l.size()), u(prob.qp.u.size());
  fill_bounds(inst, soft.y, prob, &l, &u);
  prob.qp.l = l;
  prob.qp.u = u;
  impl_->solver.update_bounds(l, u);

  QpSolution qsol;
  if (warm && impl_->have_last) {
    qsol = impl_->solver.solve_warm(impl_->last.x, impl_->last.y);
  } else {
    qsol = impl_->solver.solve();
  }
  // Iterates of a failed solve would seed the next warm start with a
  // divergent point; keep only converged ones.
  if (qsol.status == QpStatus::Solved) {
    impl_->last = qsol;
    impl_->have_last = true;
  }

  const int n = prob.n_units, t_count = prob.n_periods;
  DispatchSolution sol;
  sol.status = qsol.status;
  sol.iterations = qsol.iterations;
  sol.value = qsol.objective;
  sol.p.resize(n, t_count);
  sol.s_bal.resize(t_count);
  sol.s_up.resize(n, t_count - 1);
  sol.s_dn.resize(n, t_count - 1);
  sol.mu_balance.resize(t_count);
  sol.mu_cap_lo.resize(n, t_count);
  sol.mu_cap_hi.resize(n, t_count);
  sol.mu_ramp_up.resize(n, t_count - 1);
  sol.mu_ramp_dn.resize(n, t_count - 1);
  for (int t = 0; t < t_count; ++t) {
    sol.s_bal[t] = qsol.x[prob.var_s_bal(t)];
    sol.mu_balance[t] = qsol.y[prob.row_balance(t)];
    for (int i = 0; i < n; ++i) {
      sol.p(i, t) = qsol.x[prob.var_p(i, t)];
      sol.mu_cap_lo(i, t) = qsol.y[prob.row_cap_lo(i, t)];
      sol.mu_cap_hi(i, t) = qsol.y[prob.row_cap_hi(i, t)];
    }
  }
  for (int s = 0; s + 1 < t_count; ++s) {
    for (int i = 0; i < n; ++i) {
      sol.s_up(i, s) = qsol.x[prob.var_s_up(i, s)];
      sol.s_dn(i, s) = qsol.x[prob.var_s_dn(i, s)];
      sol.mu_ramp_up(i, s) = qsol.y[prob.row_ramp_up(i, s)];
      sol.mu_ramp_dn(i, s) = qsol.y[prob.row_ramp_dn(i, s)];
    }
  }
  sol.dispatch_cost = quadratic_cost(inst, sol.p);
  return sol;
}

DispatchSolution solve_dispatch(const Instance& inst, const SoftSchedule& soft,
                                double rho_bal, double rho_ramp) {
  DispatchContext ctx(inst, rho_bal, rho_ramp);
  return ctx.solve(soft, false);
}

Eigen::MatrixXd grad_value_wrt_commitments(const Instance& inst,
                                           const DispatchProblem& prob,
                                           const DispatchSolution& sol) {
  const int n = inst.n_units(), t_count = inst.n_periods();
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, t_count);
  // d(value)/d(bound) = -dual for whichever bound is active, so each row
  // contributes -dual * d(bound)/dy.
  for (int t = 0; t < t_count; ++t) {
    for (int i = 0; i < n; ++i) {
      const Unit& u = inst.units[i];
      double g = 0.0;
      g -= sol.mu_cap_lo(i, t) * u.p_min;
      g -= sol.mu_cap_hi(i, t) * u.p_max;
      if (t + 1 < t_count) {
        // transition t -> t+1 as the departing period
        g -= sol.mu_ramp_up(i, t) * (u.r_up - u.p_min);
        g -= sol.mu_ramp_dn(i, t) * (u.p_min - u.p_max);
      }
      if (t > 0) {
        // transition t-1 -> t as the arriving period
        g -= sol.mu_ramp_up(i, t - 1) * (u.p_min - u.p_max);
        g -= sol.mu_ramp_dn(i, t - 1) * (u.r_dn - u.p_min);
      }
      grad(i, t) = g;
    }
  }
  (void)prob;
  return grad;
}

// Slack-free layout: same row order, p variables only.
struct HardDispatchContext::Impl {
  Instance inst;
  DispatchProblem layout;  // row/var indexing helpers; qp holds the real data
  QpSolver solver;
  QpSolution last;
  bool have_last = false;

  static QpProblem build(const Instance& inst, DispatchProblem* layout) {
    validate(inst);
    layout->n_units = inst.n_units();
    layout->n_periods = inst.n_periods();
    const int n_units = layout->n_units, t_count = layout->n_periods;
    const int n_vars = n_units * t_count;
    const int n_rows = t_count + 2 * n_units * t_count + 2 * n_units * (t_count - 1);
    QpProblem qp;
    std::vector<Eigen::Triplet<double>> p_trip, a_trip;
    qp.q = Eigen::VectorXd::Zero(n_vars);
    for (int t = 0; t < t_count; ++t) {
      for (int i = 0; i < n_units; ++i) {
        const int v = layout->var_p(i, t);
        p_trip.emplace_back(v, v, 2.0 * inst.units[i].c);
        qp.q[v] = inst.units[i].b;
        a_trip.emplace_back(layout->row_balance(t), v, 1.0);
        a_trip.emplace_back(layout->row_cap_lo(i, t), v, 1.0);
        a_trip.emplace_back(layout->row_cap_hi(i, t), v, 1.0);
      }
    }
    for (int s = 0; s + 1 < t_count; ++s) {
      for (int i = 0; i < n_units; ++i) {
        a_trip.emplace_back(layout->row_ramp_up(i, s), layout->var_p(i, s + 1), 1.0);
        a_trip.emplace_back(layout->row_ramp_up(i, s), layout->var_p(i, s), -1.0);
        a_trip.emplace_back(layout->row_ramp_dn(i, s), layout->var_p(i, s), 1.0);
        a_trip.emplace_back(layout->row_ramp_dn(i, s), layout->var_p(i, s + 1), -1.0);
      }
    }
    qp.P.resize(n_vars, n_vars);
    qp.P.setFromTriplets(p_trip.begin(), p_trip.end());
    qp.A.resize(n_rows, n_vars);
    qp.A.setFromTriplets(a_trip.begin(), a_trip.end());
    qp.l.resize(n_rows);
    qp.u.resize(n_rows);
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n_units, t_count);
    fill_bounds(inst, ones, *layout, &qp.l, &qp.u);
    return qp;
  }

  Impl(const Instance& instance, const QpSettings& settings)
      : inst(instance), solver(build(instance, &layout), settings) {}
};

HardDispatchContext::HardDispatchContext(const Instance& inst,
                                         QpSettings qp_settings)
    : impl_(std::make_unique<Impl>(inst, qp_settings)) {}
HardDispatchContext::~HardDispatchContext() = default;
HardDispatchContext::HardDispatchContext(HardDispatchContext&&) noexcept = default;

HardDispatchResult HardDispatchContext::solve(const BinarySchedule& hard,
                                              bool warm) {
  const Instance& inst = impl_->inst;
  check_schedule_shape(inst, hard.n_units(), hard.n_periods());
  const DispatchProblem& layout = impl_->layout;
  const int n_rows = layout.n_periods +
                     2 * layout.n_units * layout.n_periods +
                     2 * layout.n_units * (layout.n_periods - 1);
  Eigen::VectorXd l(n_rows), u(n_rows);
  fill_bounds(inst, hard.y.cast<double>(), layout, &l, &u);
  impl_->solver.update_bounds(l, u);

  QpSolution qsol;
  if (warm && impl_->have_last) {
    qsol = impl_->solver.solve_warm(impl_->last.x, impl_->last.y);
  } else {
    qsol = impl_->solver.solve();
  }
  // Iterates of a failed solve would seed the next warm start with a
  // divergent point; keep only converged ones.
  if (qsol.status == QpStatus::Solved) {
    impl_->last = qsol;
    impl_->have_last = true;
  }

  HardDispatchResult res;
  res.status = qsol.status;
  res.iterations = qsol.iterations;
  res.p.resize(layout.n_units, layout.n_periods);
  for (int t = 0; t < layout.n_periods; ++t) {
    for (int i = 0; i < layout.n_units; ++i) {
      res.p(i, t) = qsol.x[layout.var_p(i, t)];
    }
  }
  res.cost = quadratic_cost(inst, res.p);
  return res;
}

double total_cost(const Instance& inst, const BinarySchedule& y,
                  const Eigen::MatrixXd& p) {
  check_schedule_shape(inst, y.n_units(), y.n_periods());
  check_schedule_shape(inst, static_cast<int>(p.rows()), static_cast<int>(p.cols()));
  double cost = quadratic_cost(inst, p);
  for (int t = 0; t < inst.n_periods(); ++t) {
    for (int i = 0; i < inst.n_units(); ++i) {
      cost += inst.units[i].a * y.y(i, t);
    }
  }
  return cost;
}

double total_cost(const Instance& inst, const SoftSchedule& y,
                  const Eigen::MatrixXd& p) {
  check_schedule_shape(inst, y.n_units(), y.n_periods());
  check_schedule_shape(inst, static_cast<int>(p.rows()), static_cast<int>(p.cols()));
  double cost = quadratic_cost(inst, p);
  for (int t = 0; t < inst.n_periods(); ++t) {
    for (int i = 0; i < inst.n_units(); ++i) {
      cost += inst.units[i].a * y.y(i, t);
    }
  }
  return cost;
}

}  // namespace ucpce
