// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ucpce/circuit.hpp"
#include "ucpce/dispatch.hpp"
#include "ucpce/instance.hpp"
#include "ucpce/pce.hpp"
#include "ucpce/reference.hpp"
#include "ucpce/schedule.hpp"

namespace ucpce {

enum class AnsatzKind { Brickwork, EfficientSU2 };

std::vector<double> default_thresholds();  // 0.05, 0.10, ..., 0.95

struct TrainConfig {
  AnsatzKind ansatz = AnsatzKind::Brickwork;
  int layers = 6;
  int k = 2;
  double alpha = 0.0;  // <= 0 selects n_qubits^2
  double rho_bal = 1e4;
  double rho_ramp = 1e3;
  double lambda_res = 100.0;
  int steps = 200;
  int subset_size = 16;  // parameters refreshed per step (capped at n_params)
  double lr = 0.05;
  std::uint64_t seed = 0;
  std::vector<double> thresholds = default_thresholds();
  std::vector<int> checkpoints;  // step counts whose soft schedule is kept
};

// Soft reserve shortfall sum_t softplus(-h_t)^2 over the committed-capacity
// headroom h_t = sum_i p_max_i y_it - (L_t + S_t), with its commitment
// gradient.
struct ReservePenalty {
  double value = 0.0;
  Eigen::MatrixXd grad;  // N x T
};
ReservePenalty reserve_penalty(const Instance& inst, const SoftSchedule& soft);

// Operating cost with soft commitment charges plus the weighted reserve
// penalty; the quantity reported per training step.
double upper_objective(const Instance& inst, const SoftSchedule& soft,
                       const DispatchSolution& dispatch, double lambda_res);

// The functional the training gradient differentiates: commitment charges
// plus the full follower value (slack penalties included) plus the reserve
// term. Coincides with upper_objective wherever the follower needs no slack.
double training_objective(const Instance& inst, const SoftSchedule& soft,
                          const DispatchSolution& dispatch, double lambda_res);

// Chain rule through decode and the follower envelope; columns follow
// `indices`. Solves the dispatch internally (cold start).
Eigen::VectorXd upper_gradient(const Instance& inst, const CorrelatorMap& map,
                               const Ansatz& ansatz, const Eigen::VectorXd& theta,
                               double alpha, double rho_bal, double rho_ramp,
                               double lambda_res, const std::vector<int>& indices);

struct AdamState {
  double lr = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  Eigen::VectorXd m, v;

  explicit AdamState(int n_params, double learning_rate = 0.05)
      : lr(learning_rate),
        m(Eigen::VectorXd::Zero(n_params)),
        v(Eigen::VectorXd::Zero(n_params)) {}
};

// One bias-corrected update touching only the listed coordinates; `grad` is
// aligned with `indices`.
void adam_step(AdamState& state, Eigen::VectorXd& theta,
               const std::vector<int>& indices, const Eigen::VectorXd& grad);

struct TrainStepRecord {
  double objective = 0.0;     // upper_objective at the pre-update parameters
  double cost_term = 0.0;     // commitment charges + dispatch cost
  double reserve_term = 0.0;  // lambda_res * reserve penalty
  QpStatus dispatch_status = QpStatus::MaxIter;
};

// Threshold sweep over a trained soft schedule. Feasible candidates dispatch
// without slack and pass the strict checker; the cheapest wins, ties toward
// the smaller threshold. With no feasible threshold the least-violating
// candidate is reported with its slackened dispatch.
struct PostprocessResult {
  bool feasible = false;
  double tau = 0.0;
  BinarySchedule y;
  Eigen::MatrixXd p;
  double cost = 0.0;
  FeasibilityReport report;
};

PostprocessResult postprocess(const Instance& inst, const SoftSchedule& soft,
                              const std::vector<double>& thresholds,
                              double rho_bal, double rho_ramp);

struct TrainResult {
  Eigen::VectorXd theta;
  SoftSchedule soft;
  PostprocessResult post;
  std::vector<TrainStepRecord> history;
  std::vector<std::pair<int, SoftSchedule>> checkpoints;
  int n_qubits = 0;
  int n_params = 0;
};

// Deterministic per (config, seed): identical calls produce identical
// histories and results bit for bit.
TrainResult train(const Instance& inst, const TrainConfig& config);

}  // namespace ucpce
