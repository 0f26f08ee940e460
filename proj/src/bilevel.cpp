// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include "ucpce/bilevel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "ucpce/rng.hpp"

namespace ucpce {

namespace {

constexpr double kPi = 3.14159265358979323846;

double softplus(double x) {
  // log(1 + e^x) without overflow on either tail.
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  return x > 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double commitment_charges(const Instance& inst, const SoftSchedule& soft) {
  double total = 0.0;
  for (int t = 0; t < inst.n_periods(); ++t) {
    for (int i = 0; i < inst.n_units(); ++i) {
      total += inst.units[i].a * soft.y(i, t);
    }
  }
  return total;
}

Ansatz build_ansatz(AnsatzKind kind, int n_qubits, int layers) {
  return kind == AnsatzKind::Brickwork ? build_brickwork(n_qubits, layers)
                                       : build_efficient_su2(n_qubits, layers);
}

std::string schedule_key(const BinarySchedule& y) {
  std::string key;
  key.reserve(static_cast<size_t>(y.y.size()));
  for (int i = 0; i < y.y.rows(); ++i) {
    for (int t = 0; t < y.y.cols(); ++t) {
      key.push_back(y.y(i, t) ? '1' : '0');
    }
  }
  return key;
}

}  // namespace

std::vector<double> default_thresholds() {
  std::vector<double> taus;
  taus.reserve(19);
  for (int i = 1; i <= 19; ++i) taus.push_back(i / 20.0);
  return taus;
}

ReservePenalty reserve_penalty(const Instance& inst, const SoftSchedule& soft) {
  const int n = inst.n_units(), t_count = inst.n_periods();
  if (soft.n_units() != n || soft.n_periods() != t_count) {
    throw std::invalid_argument("schedule shape does not match instance");
  }
  ReservePenalty res;
  res.grad = Eigen::MatrixXd::Zero(n, t_count);
  for (int t = 0; t < t_count; ++t) {
    double headroom = -(inst.loads[t] + inst.reserves[t]);
    for (int i = 0; i < n; ++i) headroom += inst.units[i].p_max * soft.y(i, t);
    const double sp = softplus(-headroom);
    res.value += sp * sp;
    const double factor = -2.0 * sp * sigmoid(-headroom);
    for (int i = 0; i < n; ++i) {
      res.grad(i, t) = factor * inst.units[i].p_max;
    }
  }
  return res;
}

double upper_objective(const Instance& inst, const SoftSchedule& soft,
                       const DispatchSolution& dispatch, double lambda_res) {
  return commitment_charges(inst, soft) + dispatch.dispatch_cost +
         lambda_res * reserve_penalty(inst, soft).value;
}

double training_objective(const Instance& inst, const SoftSchedule& soft,
                          const DispatchSolution& dispatch, double lambda_res) {
  return commitment_charges(inst, soft) + dispatch.value +
         lambda_res * reserve_penalty(inst, soft).value;
}

Eigen::VectorXd upper_gradient(const Instance& inst, const CorrelatorMap& map,
                               const Ansatz& ansatz, const Eigen::VectorXd& theta,
                               double alpha, double rho_bal, double rho_ramp,
                               double lambda_res, const std::vector<int>& indices) {
  const Statevector psi = simulate(ansatz, theta);
  const Eigen::VectorXd e = expect_all(psi, map.strings);
  const SoftSchedule soft = decode_soft(e, alpha, map);
  const Eigen::VectorXd dgrad = decode_grad(e, alpha);

  DispatchContext ctx(inst, rho_bal, rho_ramp);
  const DispatchSolution dsol = ctx.solve(soft, false);
  const Eigen::MatrixXd env = grad_value_wrt_commitments(inst, ctx.problem(), dsol);
  const ReservePenalty res = reserve_penalty(inst, soft);

  Eigen::VectorXd per_var(map.n_vars());
  for (int j = 0; j < map.n_vars(); ++j) {
    const int i = map.unit_of(j), t = map.period_of(j);
    per_var[j] =
        (inst.units[i].a + env(i, t) + lambda_res * res.grad(i, t)) * dgrad[j];
  }
  const Eigen::MatrixXd shift = param_shift_grad(ansatz, theta, map.strings, indices);
  return shift.transpose() * per_var;
}

void adam_step(AdamState& state, Eigen::VectorXd& theta,
               const std::vector<int>& indices, const Eigen::VectorXd& grad) {
  if (static_cast<Eigen::Index>(indices.size()) != grad.size()) {
    throw std::invalid_argument("gradient length does not match index count");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t c = 0; c < indices.size(); ++c) {
    const int m = indices[c];
    const double g = grad[static_cast<Eigen::Index>(c)];
    state.m[m] = state.beta1 * state.m[m] + (1.0 - state.beta1) * g;
    state.v[m] = state.beta2 * state.v[m] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[m] / bc1;
    const double vhat = state.v[m] / bc2;
    theta[m] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

PostprocessResult postprocess(const Instance& inst, const SoftSchedule& soft,
                              const std::vector<double>& thresholds,
                              double rho_bal, double rho_ramp) {
  if (thresholds.empty()) throw std::invalid_argument("no thresholds given");
  std::vector<double> taus = thresholds;
  std::sort(taus.begin(), taus.end());

  HardDispatchContext hard_ctx(inst);
  std::unique_ptr<DispatchContext> slack_ctx;

  struct Candidate {
    bool valid = false;
    double tau = 0.0;
    BinarySchedule y;
    Eigen::MatrixXd p;
    double cost = 0.0;
    FeasibilityReport report;
  };
  Candidate best_feasible, best_infeasible;
  std::map<std::string, char> seen;  // distinct schedules across thresholds

  for (double tau : taus) {
    BinarySchedule y = harden(soft, tau);
    const std::string key = schedule_key(y);
    if (!seen.emplace(key, 1).second) continue;

    const HardDispatchResult hard = hard_ctx.solve(y);
    if (hard.status == QpStatus::Solved) {
      FeasibilityReport rep = check_feasibility(inst, y, hard.p);
      if (rep.feasible) {
        const double cost = total_cost(inst, y, hard.p);
        if (!best_feasible.valid || cost < best_feasible.cost) {
          best_feasible = {true, tau, y, hard.p, cost, std::move(rep)};
        }
        continue;
      }
    }
    // Infeasible at this threshold: dispatch with slack for reporting.
    if (!slack_ctx) {
      slack_ctx = std::make_unique<DispatchContext>(inst, rho_bal, rho_ramp);
    }
    SoftSchedule relaxed;
    relaxed.y = y.y.cast<double>();
    const DispatchSolution dsol = slack_ctx->solve(relaxed);
    FeasibilityReport rep = check_feasibility(inst, y, dsol.p);
    const double cost = total_cost(inst, y, dsol.p);
    const size_t nv = rep.violations.size();
    const bool better =
        !best_infeasible.valid ||
        nv < best_infeasible.report.violations.size() ||
        (nv == best_infeasible.report.violations.size() &&
         cost < best_infeasible.cost);
    if (better) {
      best_infeasible = {true, tau, y, dsol.p, cost, std::move(rep)};
    }
  }

  const Candidate& chosen = best_feasible.valid ? best_feasible : best_infeasible;
  PostprocessResult out;
  out.feasible = best_feasible.valid;
  out.tau = chosen.tau;
  out.y = chosen.y;
  out.p = chosen.p;
  out.cost = chosen.cost;
  out.report = chosen.report;
  return out;
}

TrainResult train(const Instance& inst, const TrainConfig& config) {
  validate(inst);
  if (config.steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (config.layers < 1) throw std::invalid_argument("layers must be >= 1");
  if (config.subset_size < 1) throw std::invalid_argument("subset_size must be >= 1");

  const int n_vars = inst.n_units() * inst.n_periods();
  const int n_qubits = select_qubit_count(n_vars, config.k);
  const CorrelatorMap map =
      build_correlators(n_qubits, config.k, inst.n_units(), inst.n_periods());
  const Ansatz ansatz = build_ansatz(config.ansatz, n_qubits, config.layers);
  const double alpha =
      config.alpha > 0 ? config.alpha : static_cast<double>(n_qubits) * n_qubits;

  Rng rng(config.seed);
  Eigen::VectorXd theta(ansatz.n_params);
  for (int i = 0; i < ansatz.n_params; ++i) {
    theta[i] = -kPi + 2.0 * kPi * rng.uniform();
  }

  AdamState adam(ansatz.n_params, config.lr);
  DispatchContext dispatch(inst, config.rho_bal, config.rho_ramp);
  const int subset_size = std::min(config.subset_size, ansatz.n_params);

  TrainResult result;
  result.n_qubits = n_qubits;
  result.n_params = ansatz.n_params;
  result.history.reserve(config.steps);

  auto decode_current = [&](const Eigen::VectorXd& params) {
    const Statevector psi = simulate(ansatz, params);
    const Eigen::VectorXd e = expect_all(psi, map.strings);
    return std::make_pair(e, decode_soft(e, alpha, map));
  };

  for (int step = 0; step < config.steps; ++step) {
    const auto [e, soft] = decode_current(theta);
    const Eigen::VectorXd dgrad = decode_grad(e, alpha);
    const DispatchSolution dsol = dispatch.solve(soft, step > 0);
    const ReservePenalty res = reserve_penalty(inst, soft);

    TrainStepRecord rec;
    rec.cost_term = commitment_charges(inst, soft) + dsol.dispatch_cost;
    rec.reserve_term = config.lambda_res * res.value;
    rec.objective = rec.cost_term + rec.reserve_term;
    rec.dispatch_status = dsol.status;
    result.history.push_back(rec);

    const Eigen::MatrixXd env =
        grad_value_wrt_commitments(inst, dispatch.problem(), dsol);
    Eigen::VectorXd per_var(n_vars);
    for (int j = 0; j < n_vars; ++j) {
      const int i = map.unit_of(j), t = map.period_of(j);
      per_var[j] = (inst.units[i].a + env(i, t) +
                    config.lambda_res * res.grad(i, t)) *
                   dgrad[j];
    }

    const std::vector<int> subset = rng.sample_indices(ansatz.n_params, subset_size);
    const Eigen::MatrixXd shift = param_shift_grad(ansatz, theta, map.strings, subset);
    const Eigen::VectorXd grad = shift.transpose() * per_var;
    adam_step(adam, theta, subset, grad);

    for (int mark : config.checkpoints) {
      if (mark == step + 1) {
        result.checkpoints.emplace_back(mark, decode_current(theta).second);
      }
    }
  }

  result.theta = theta;
  result.soft = decode_current(theta).second;
  result.post = postprocess(inst, result.soft, config.thresholds, config.rho_bal,
                            config.rho_ramp);
  return result;
}

}  // namespace ucpce
