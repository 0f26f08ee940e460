// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include "ucpce/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "ucpce/dispatch.hpp"

namespace ucpce {

namespace {

double rel_tol(double tol, double scale) {
  return tol * std::max(1.0, std::abs(scale));
}

}  // namespace

FeasibilityReport check_feasibility(const Instance& inst, const BinarySchedule& y,
                                    const Eigen::MatrixXd& p, double tol) {
  validate(inst);
  const int n = inst.n_units(), t_count = inst.n_periods();
  if (y.n_units() != n || y.n_periods() != t_count ||
      static_cast<int>(p.rows()) != n || static_cast<int>(p.cols()) != t_count) {
    throw std::invalid_argument("schedule/dispatch shape does not match instance");
  }
  if (tol < 0) throw std::invalid_argument("tolerance must be >= 0");

  FeasibilityReport report;
  report.total_constraints = count_constraints(inst);

  for (int t = 0; t < t_count; ++t) {
    for (int i = 0; i < n; ++i) {
      const Unit& u = inst.units[i];
      const double lo = u.p_min * y.y(i, t);
      const double hi = u.p_max * y.y(i, t);
      if (p(i, t) < lo - rel_tol(tol, lo)) {
        report.violations.push_back(
            {ConstraintKind::CapacityLower, i, t, lo - p(i, t)});
      }
      if (p(i, t) > hi + rel_tol(tol, hi)) {
        report.violations.push_back(
            {ConstraintKind::CapacityUpper, i, t, p(i, t) - hi});
      }
    }
  }
  for (int s = 0; s + 1 < t_count; ++s) {
    for (int i = 0; i < n; ++i) {
      const Unit& u = inst.units[i];
      const double y0 = y.y(i, s), y1 = y.y(i, s + 1);
      const double up_rhs =
          u.r_up * y0 + u.p_min * (y1 - y0) + u.p_max * (1.0 - y1);
      const double dn_rhs =
          u.r_dn * y1 + u.p_min * (y0 - y1) + u.p_max * (1.0 - y0);
      const double up_lhs = p(i, s + 1) - p(i, s);
      const double dn_lhs = p(i, s) - p(i, s + 1);
      if (up_lhs > up_rhs + rel_tol(tol, up_rhs)) {
        report.violations.push_back(
            {ConstraintKind::RampUp, i, s, up_lhs - up_rhs});
      }
      if (dn_lhs > dn_rhs + rel_tol(tol, dn_rhs)) {
        report.violations.push_back(
            {ConstraintKind::RampDown, i, s, dn_lhs - dn_rhs});
      }
    }
  }
  for (int t = 0; t < t_count; ++t) {
    double gen = 0.0, cap = 0.0;
    for (int i = 0; i < n; ++i) {
      gen += p(i, t);
      cap += inst.units[i].p_max * y.y(i, t);
    }
    const double imbalance = std::abs(gen - inst.loads[t]);
    if (imbalance > rel_tol(tol, inst.loads[t])) {
      report.violations.push_back({ConstraintKind::Balance, -1, t, imbalance});
    }
    const double need = inst.loads[t] + inst.reserves[t];
    if (cap < need - rel_tol(tol, need)) {
      report.violations.push_back({ConstraintKind::Reserve, -1, t, need - cap});
    }
  }
  report.feasible = report.violations.empty();
  return report;
}

double violation_percentage(const FeasibilityReport& report) {
  if (report.total_constraints == 0) return 0.0;
  return 100.0 * static_cast<double>(report.violations.size()) /
         static_cast<double>(report.total_constraints);
}

double gap_percent(double cost, double reference_cost) {
  if (reference_cost <= 0.0) {
    throw std::invalid_argument("reference cost must be positive");
  }
  return 100.0 * (cost - reference_cost) / reference_cost;
}

ExhaustiveResult exhaustive_solve(const Instance& inst, std::uint64_t budget) {
  validate(inst);
  const int n = inst.n_units(), t_count = inst.n_periods();
  const int n_bits = n * t_count;
  ExhaustiveResult res;
  if (n_bits > 63 || (std::uint64_t{1} << n_bits) > budget) {
    res.status = ExhaustiveResult::Status::BudgetExceeded;
    return res;
  }
  const std::uint64_t total = std::uint64_t{1} << n_bits;

  HardDispatchContext ctx(inst);
  BinarySchedule y;
  y.y.resize(n, t_count);
  bool found = false;
  double best_cost = 0.0;
  BinarySchedule best_y;
  Eigen::MatrixXd best_p;

  for (std::uint64_t s = 0; s < total; ++s) {
    // Bit (n_bits - 1 - (i*T + t)) holds y(i,t): ascending s enumerates
    // schedules in lexicographic unit-major order, so the first optimum seen
    // is the lexicographically smallest.
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < t_count; ++t) {
        const int pos = n_bits - 1 - (i * t_count + t);
        y.y(i, t) = static_cast<int>((s >> pos) & 1u);
      }
    }
    bool prune = false;
    for (int t = 0; t < t_count && !prune; ++t) {
      double cap = 0.0, floor = 0.0;
      for (int i = 0; i < n; ++i) {
        cap += inst.units[i].p_max * y.y(i, t);
        floor += inst.units[i].p_min * y.y(i, t);
      }
      if (cap < inst.loads[t] + inst.reserves[t]) prune = true;
      if (cap < inst.loads[t]) prune = true;
      if (floor > inst.loads[t]) prune = true;
    }
    if (prune) continue;

    ++res.evaluated;
    const HardDispatchResult d = ctx.solve(y);
    if (d.status != QpStatus::Solved) continue;
    if (!check_feasibility(inst, y, d.p).feasible) continue;
    const double cost = total_cost(inst, y, d.p);
    if (!found || cost < best_cost) {
      found = true;
      best_cost = cost;
      best_y = y;
      best_p = d.p;
    }
  }

  if (!found) {
    res.status = ExhaustiveResult::Status::NoFeasibleSchedule;
    return res;
  }
  res.status = ExhaustiveResult::Status::Optimal;
  res.y = best_y;
  res.p = best_p;
  res.cost = best_cost;
  return res;
}

std::optional<double> known_reference_cost(const std::string& name) {
  if (name == "UC_4b") return 32417.47;
  if (name == "UC_10a") return 69070.09;
  if (name == "UC_10b") return 80447.49;
  if (name == "UC_12a") return 88070.83;
  if (name == "UC_12b") return 154974.96;
  if (name == "UC_26a") return 312510.44;
  if (name == "UC_26b") return 314692.81;
  return std::nullopt;
}

RunSummary summarize(const std::vector<RunOutcome>& runs,
                     std::optional<double> reference_cost) {
  RunSummary s;
  s.n_runs = static_cast<int>(runs.size());
  double sum = 0.0;
  for (const RunOutcome& r : runs) {
    if (!r.feasible) continue;
    ++s.n_feasible;
    sum += r.cost;
    if (!s.best_cost || r.cost < *s.best_cost) s.best_cost = r.cost;
  }
  if (s.n_runs > 0) {
    s.feasibility_rate_pct = 100.0 * s.n_feasible / s.n_runs;
  }
  if (s.n_feasible > 0) {
    const double mean = sum / s.n_feasible;
    double var = 0.0;
    for (const RunOutcome& r : runs) {
      if (r.feasible) var += (r.cost - mean) * (r.cost - mean);
    }
    s.mean_cost = mean;
    s.stdev_cost = std::sqrt(var / s.n_feasible);
    if (reference_cost) s.best_gap_pct = gap_percent(*s.best_cost, *reference_cost);
  }
  return s;
}

}  // namespace ucpce
