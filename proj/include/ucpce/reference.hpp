// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ucpce/instance.hpp"
#include "ucpce/schedule.hpp"

namespace ucpce {

enum class ConstraintKind : std::uint8_t {
  Balance,
  CapacityLower,
  CapacityUpper,
  RampUp,
  RampDown,
  Reserve,
};

struct Violation {
  ConstraintKind kind;
  int unit = -1;  // -1 for per-period rows (balance, reserve)
  int period = 0; // departing period for ramp rows
  double magnitude = 0.0;
};

struct FeasibilityReport {
  bool feasible = false;
  long total_constraints = 0;
  std::vector<Violation> violations;
};

// Every constraint of the committed problem checked at relative tolerance
// tol * max(1, |row scale|); scale is the row's own bound.
FeasibilityReport check_feasibility(const Instance& inst, const BinarySchedule& y,
                                    const Eigen::MatrixXd& p, double tol = 1e-6);

double violation_percentage(const FeasibilityReport& report);

// 100 * (cost - reference) / reference.
double gap_percent(double cost, double reference_cost);

struct ExhaustiveResult {
  enum class Status { Optimal, NoFeasibleSchedule, BudgetExceeded };
  Status status = Status::BudgetExceeded;
  BinarySchedule y;
  Eigen::MatrixXd p;
  double cost = 0.0;
  std::uint64_t evaluated = 0;  // schedules that reached the dispatch solve
};

// Enumerates all 2^(N*T) commitments (refusing when that exceeds budget),
// prunes period-wise reserve/capacity infeasibilities, and dispatches the
// survivors exactly. Ties resolve to the lexicographically smallest schedule
// in unit-major order.
ExhaustiveResult exhaustive_solve(const Instance& inst,
                                  std::uint64_t budget = 1u << 20);

// Benchmark operating costs for the bundled instances.
std::optional<double> known_reference_cost(const std::string& name);

struct RunOutcome {
  bool feasible = false;
  double cost = 0.0;
};

struct RunSummary {
  int n_runs = 0;
  int n_feasible = 0;
  double feasibility_rate_pct = 0.0;
  std::optional<double> best_cost;
  std::optional<double> mean_cost;
  std::optional<double> stdev_cost;    // population stdev over feasible runs
  std::optional<double> best_gap_pct;  // absent without a reference cost
};

RunSummary summarize(const std::vector<RunOutcome>& runs,
                     std::optional<double> reference_cost);

}  // namespace ucpce
