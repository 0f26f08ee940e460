// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include "ucpce/qp.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ucpce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinScaling = 1e-4;
constexpr double kMaxScaling = 1e4;
constexpr double kRhoFree = 1e-6;
constexpr double kRhoEqualityFactor = 1e3;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
// A multiplier this small on the wrong side of its row is refinement noise,
// not a misidentified active constraint.
constexpr double kPolishSignTol = 1e-8;

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

Eigen::VectorXd clamp(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& sol) {
  KktResiduals r;
  const Eigen::VectorXd ax = problem.A * sol.x;
  r.primal = inf_norm(ax - clamp(ax, problem.l, problem.u));
  r.dual = inf_norm(problem.P.selfadjointView<Eigen::Lower>() * sol.x + problem.q +
                    problem.A.transpose() * sol.y);
  double comp = 0.0;
  for (int j = 0; j < problem.m(); ++j) {
    const double yj = sol.y[j];
    if (yj == 0.0) continue;
    const double bound = yj > 0 ? problem.u[j] : problem.l[j];
    const double dist = std::isfinite(bound) ? std::abs(ax[j] - bound) : kInf;
    comp = std::max(comp, std::min(std::abs(yj), dist));
  }
  r.comp = comp;
  return r;
}

struct QpSolver::Impl {
  QpProblem orig;
  QpSettings opts;

  // Scaled data: x = sx .* xs, y = (sy .* ys) / c, z = zs ./ sy.
  Eigen::SparseMatrix<double> Ps, As;
  Eigen::VectorXd qs, ls, us;
  Eigen::VectorXd sx, sy;
  double c = 1.0;

  enum class RowClass { Free, Inequality, Equality };
  std::vector<RowClass> row_class;
  double rho_bar = 0.1;     // base penalty, rebalanced between checks
  Eigen::VectorXd rho;      // per-row penalty in scaled space
  Eigen::VectorXd rho_inv;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool trivially_infeasible = false;

  Impl(QpProblem problem, QpSettings settings)
      : orig(std::move(problem)), opts(settings) {
    const int n = orig.n(), m = orig.m();
    if (orig.P.rows() != n || orig.P.cols() != n || orig.A.rows() != m ||
        orig.A.cols() != n || orig.u.size() != m) {
      throw std::invalid_argument("inconsistent QP dimensions");
    }
    for (int j = 0; j < m; ++j) {
      if (orig.l[j] > orig.u[j] || orig.l[j] == kInf || orig.u[j] == -kInf) {
        trivially_infeasible = true;
      }
    }
    Ps = orig.P;
    As = orig.A;
    qs = orig.q;
    sx = Eigen::VectorXd::Ones(n);
    sy = Eigen::VectorXd::Ones(m);
    if (opts.scaling) equilibrate();
    ls = sy.cwiseProduct(orig.l);
    us = sy.cwiseProduct(orig.u);

    row_class.resize(m);
    for (int j = 0; j < m; ++j) {
      const bool lo = std::isfinite(orig.l[j]);
      const bool hi = std::isfinite(orig.u[j]);
      if (!lo && !hi) {
        row_class[j] = RowClass::Free;
      } else if (lo && hi && orig.u[j] - orig.l[j] <= 1e-9) {
        row_class[j] = RowClass::Equality;
      } else {
        row_class[j] = RowClass::Inequality;
      }
    }
    rho_bar = std::clamp(opts.rho, kRhoMin, kRhoMax);
    apply_rho();
    factorize();
  }

  void apply_rho() {
    rho.resize(orig.m());
    for (int j = 0; j < orig.m(); ++j) {
      switch (row_class[j]) {
        case RowClass::Free:
          rho[j] = kRhoFree;
          break;
        case RowClass::Equality:
          rho[j] = std::clamp(kRhoEqualityFactor * rho_bar, kRhoMin, kRhoMax);
          break;
        case RowClass::Inequality:
          rho[j] = rho_bar;
          break;
      }
    }
    rho_inv = rho.cwiseInverse();
  }

  // Ruiz equilibration of the KKT block matrix plus cost normalization.
  void equilibrate() {
    const int n = orig.n(), m = orig.m();
    for (int pass = 0; pass < opts.scaling_iters; ++pass) {
      Eigen::VectorXd dx = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd dy = Eigen::VectorXd::Zero(m);
      for (int col = 0; col < n; ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(Ps, col); it; ++it) {
          dx[col] = std::max(dx[col], std::abs(it.value()));
          dx[it.row()] = std::max(dx[it.row()], std::abs(it.value()));
        }
        for (Eigen::SparseMatrix<double>::InnerIterator it(As, col); it; ++it) {
          dx[col] = std::max(dx[col], std::abs(it.value()));
          dy[it.row()] = std::max(dy[it.row()], std::abs(it.value()));
        }
      }
      auto to_scale = [](double v) {
        if (v <= 0) return 1.0;
        const double s = 1.0 / std::sqrt(v);
        return std::clamp(s, kMinScaling, kMaxScaling);
      };
      dx = dx.unaryExpr(to_scale);
      dy = dy.unaryExpr(to_scale);
      Ps = dx.asDiagonal() * Ps * dx.asDiagonal();
      As = dy.asDiagonal() * As * dx.asDiagonal();
      qs = dx.cwiseProduct(qs);
      sx = sx.cwiseProduct(dx);
      sy = sy.cwiseProduct(dy);

      double p_col_mean = 0.0;
      for (int col = 0; col < n; ++col) {
        double cn = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(Ps, col); it; ++it) {
          cn = std::max(cn, std::abs(it.value()));
        }
        p_col_mean += cn;
      }
      p_col_mean /= std::max(1, n);
      const double denom = std::max(p_col_mean, inf_norm(qs));
      if (denom > 0) {
        const double gamma = std::clamp(1.0 / denom, kMinScaling, kMaxScaling);
        Ps *= gamma;
        qs *= gamma;
        c *= gamma;
      }
    }
  }

  void factorize() {
    const int n = orig.n(), m = orig.m();
    Eigen::SparseMatrix<double> kkt(n + m, n + m);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(Ps.nonZeros() + As.nonZeros() + n + m);
    for (int col = 0; col < n; ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(Ps, col); it; ++it) {
        trip.emplace_back(it.row(), col, it.value());
      }
    }
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, opts.sigma);
    for (int col = 0; col < n; ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(As, col); it; ++it) {
        trip.emplace_back(n + it.row(), col, it.value());
        trip.emplace_back(col, n + it.row(), it.value());
      }
    }
    for (int j = 0; j < m; ++j) trip.emplace_back(n + j, n + j, -rho_inv[j]);
    kkt.setFromTriplets(trip.begin(), trip.end());
    ldlt.compute(kkt);
    if (ldlt.info() != Eigen::Success) {
      throw std::runtime_error("KKT factorization failed");
    }
  }

  struct Iterates {
    Eigen::VectorXd x, y, z;  // scaled
  };

  // Termination test in unscaled quantities. When `rho_est` is given it
  // receives the residual-balancing penalty estimate
  // rho_bar * sqrt(normalized primal / normalized dual residual).
  bool converged(const Iterates& it, QpSolution* out,
                 double* rho_est = nullptr) const {
    const Eigen::VectorXd x = sx.cwiseProduct(it.x);
    const Eigen::VectorXd y = sy.cwiseProduct(it.y) / c;
    const Eigen::VectorXd z = it.z.cwiseQuotient(sy);
    const Eigen::VectorXd ax = orig.A * x;
    const Eigen::VectorXd px = orig.P.selfadjointView<Eigen::Lower>() * x;
    const Eigen::VectorXd aty = orig.A.transpose() * y;
    const double rp = inf_norm(ax - z);
    const double rd = inf_norm(px + orig.q + aty);
    const double pri_norm = std::max(inf_norm(ax), inf_norm(z));
    const double dua_norm =
        std::max({inf_norm(px), inf_norm(aty), inf_norm(orig.q)});
    if (rho_est) {
      const double rp_n = rp / std::max(pri_norm, 1e-12);
      const double rd_n = rd / std::max(dua_norm, 1e-12);
      *rho_est = std::clamp(
          rho_bar * std::sqrt(rp_n / std::max(rd_n, 1e-12)), kRhoMin, kRhoMax);
    }
    const double ep = opts.eps_abs + opts.eps_rel * pri_norm;
    const double ed = opts.eps_abs + opts.eps_rel * dua_norm;
    if (rp <= ep && rd <= ed) {
      out->x = x;
      out->y = y;
      out->z = z;
      return true;
    }
    return false;
  }

  // Farkas-style certificate: a dual direction dy (unscaled) with
  // ||A' dy|| ~ 0 whose bound support u'(dy)+ + l'(dy)- is negative proves
  // that no point satisfies l <= Ax <= u.
  bool primal_infeasible(const Eigen::VectorXd& dy_scaled) const {
    const Eigen::VectorXd dy = sy.cwiseProduct(dy_scaled) / c;
    const double norm = inf_norm(dy);
    if (norm <= 0.0) return false;
    double support = 0.0;
    for (int j = 0; j < orig.m(); ++j) {
      const double d = dy[j] / norm;
      if (d > 0.0) {
        if (!std::isfinite(orig.u[j])) return false;
        support += orig.u[j] * d;
      } else if (d < 0.0) {
        if (!std::isfinite(orig.l[j])) return false;
        support += orig.l[j] * d;
      }
    }
    if (support > opts.eps_prim_inf) return false;
    return inf_norm(orig.A.transpose() * dy) / norm <= opts.eps_prim_inf;
  }

  // Active-set KKT solve on the original data with delta-regularization and
  // iterative refinement; keeps the result only when it tightens residuals.
  // Degenerate vertices need two repairs before the duals are usable. Two
  // one-sided rows with identical coefficients can both be active (a variable
  // pinned to a point from opposite sides); they must share one multiplier
  // slot, otherwise the reduced system is singular and the dual splits with
  // inconsistent signs. Beyond exact duplicates, active rows can be linearly
  // dependent, and the minimum-norm multipliers of the reduced system can
  // then land on the wrong side of their row; the point is kept and the
  // multipliers alone are re-solved as a sign-constrained least-distance
  // problem over the same rows.
  void polish(QpSolution* sol) const {
    const int n = orig.n(), m = orig.m();
    std::vector<int> active;
    std::vector<double> bound;
    std::vector<bool> at_upper;
    for (int j = 0; j < m; ++j) {
      if (sol->y[j] < -100 * opts.eps_abs && std::isfinite(orig.l[j])) {
        active.push_back(j);
        bound.push_back(orig.l[j]);
        at_upper.push_back(false);
      } else if (sol->y[j] > 100 * opts.eps_abs && std::isfinite(orig.u[j])) {
        active.push_back(j);
        bound.push_back(orig.u[j]);
        at_upper.push_back(true);
      }
    }
    const int ma = static_cast<int>(active.size());

    // Group active rows by their exact coefficient pattern; duplicates with a
    // matching pinned bound collapse into the leader's slot.
    std::vector<int> row_to_k(m, -1);
    for (int k = 0; k < ma; ++k) row_to_k[active[k]] = k;
    std::vector<std::vector<std::pair<int, double>>> sig(ma);
    for (int col = 0; col < n; ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(orig.A, col); it; ++it) {
        const int k = row_to_k[it.row()];
        if (k >= 0) sig[k].emplace_back(col, it.value());
      }
    }
    std::map<std::vector<std::pair<int, double>>, int> seen;
    std::vector<std::vector<int>> members;
    for (int k = 0; k < ma; ++k) {
      const auto [it, inserted] = seen.try_emplace(
          sig[k], static_cast<int>(members.size()));
      if (!inserted && bound[members[it->second].front()] == bound[k]) {
        members[it->second].push_back(k);
        continue;
      }
      if (!inserted) it->second = static_cast<int>(members.size());
      members.push_back({k});
    }

    const int n_slots = static_cast<int>(members.size());
    const int dim = n + n_slots;
    std::vector<int> slot_of_row(m, -1);
    for (int s = 0; s < n_slots; ++s) {
      slot_of_row[active[members[s].front()]] = s;
    }

    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < n; ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(orig.P, col); it;
           ++it) {
        trip.emplace_back(it.row(), col, it.value());
      }
    }
    // Merged rows contribute the same coefficients, so only the group
    // leader's are emitted.
    for (int col = 0; col < n; ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(orig.A, col); it;
           ++it) {
        const int s = slot_of_row[it.row()];
        if (s < 0) continue;
        trip.emplace_back(n + s, col, it.value());
        trip.emplace_back(col, n + s, it.value());
      }
    }
    std::vector<Eigen::Triplet<double>> trip_reg = trip;
    for (int i = 0; i < n; ++i) {
      trip_reg.emplace_back(i, i, opts.polish_delta);
    }
    for (int s = 0; s < n_slots; ++s) {
      trip_reg.emplace_back(n + s, n + s, -opts.polish_delta);
    }
    Eigen::SparseMatrix<double> k0(dim, dim), kreg(dim, dim);
    k0.setFromTriplets(trip.begin(), trip.end());
    kreg.setFromTriplets(trip_reg.begin(), trip_reg.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact(kreg);
    if (fact.info() != Eigen::Success) return;

    Eigen::VectorXd rhs(dim);
    rhs.head(n) = -orig.q;
    for (int s = 0; s < n_slots; ++s) rhs[n + s] = bound[members[s].front()];
    Eigen::VectorXd v = fact.solve(rhs);
    for (int pass = 0; pass < opts.polish_refine_iters; ++pass) {
      const Eigen::VectorXd resid = rhs - k0 * v;
      v += fact.solve(resid);
    }
    const Eigen::VectorXd x = v.head(n);

    // A slot multiplier lands on the member whose pinned side matches its
    // sign; values at noise level on the wrong side are dropped. Reports
    // whether any significant multiplier had no matching side.
    const auto distribute = [&](const Eigen::VectorXd& mu,
                                Eigen::VectorXd* y_full) {
      y_full->setZero();
      bool clean = true;
      for (int s = 0; s < n_slots; ++s) {
        int pick = -1;
        for (const int k : members[s]) {
          if ((mu[s] < 0.0 && !at_upper[k]) || (mu[s] > 0.0 && at_upper[k])) {
            pick = k;
            break;
          }
        }
        if (pick < 0) {
          if (std::abs(mu[s]) > kPolishSignTol) clean = false;
          continue;
        }
        (*y_full)[active[pick]] = mu[s];
      }
      return clean;
    };

    QpSolution cand = *sol;
    cand.x = x;
    cand.y = Eigen::VectorXd::Zero(m);
    if (!distribute(v.tail(n_slots), &cand.y)) {
      // Stationarity holds at x for the reduced multipliers, so the equality
      // system below is consistent; the solve moves the multipliers inside
      // the sign cone while staying close to the magnitudes the main loop
      // observed. Polish stays disabled to keep the recursion depth at one.
      QpProblem rep;
      std::vector<Eigen::Triplet<double>> rp, ra;
      rep.q = Eigen::VectorXd::Zero(n_slots);
      for (int s = 0; s < n_slots; ++s) {
        rp.emplace_back(s, s, 1.0);
        double observed = 0.0;
        for (const int k : members[s]) observed += sol->y[active[k]];
        rep.q[s] = -observed;
      }
      rep.l.resize(n + n_slots);
      rep.u.resize(n + n_slots);
      const Eigen::VectorXd target =
          -(orig.P.selfadjointView<Eigen::Lower>() * x + orig.q);
      for (int i = 0; i < n; ++i) rep.l[i] = rep.u[i] = target[i];
      for (int s = 0; s < n_slots; ++s) {
        bool has_lower = false, has_upper = false;
        for (const int k : members[s]) (at_upper[k] ? has_upper : has_lower) = true;
        rep.l[n + s] = has_lower ? -kInf : 0.0;
        rep.u[n + s] = has_upper ? kInf : 0.0;
      }
      for (int s = 0; s < n_slots; ++s) {
        for (const auto& [col, val] : sig[members[s].front()]) {
          ra.emplace_back(col, s, val);
        }
        ra.emplace_back(n + s, s, 1.0);
      }
      rep.P.resize(n_slots, n_slots);
      rep.P.setFromTriplets(rp.begin(), rp.end());
      rep.A.resize(n + n_slots, n_slots);
      rep.A.setFromTriplets(ra.begin(), ra.end());
      QpSettings rs = opts;
      rs.polish = false;
      rs.eps_abs = 1e-9;
      rs.eps_rel = 1e-9;
      const QpSolution rsol = solve_qp(rep, rs);
      if (rsol.status == QpStatus::Solved) distribute(rsol.x, &cand.y);
    }
    const Eigen::VectorXd ax = orig.A * cand.x;
    cand.z = clamp(ax, orig.l, orig.u);
    const KktResiduals before = kkt_residuals(orig, *sol);
    const KktResiduals after = kkt_residuals(orig, cand);
    if (std::max({after.primal, after.dual, after.comp}) <=
        std::max({before.primal, before.dual, before.comp})) {
      cand.polished = true;
      *sol = cand;
    }
  }

  QpSolution run(const Eigen::VectorXd* x0, const Eigen::VectorXd* y0) {
    const int n = orig.n(), m = orig.m();
    QpSolution sol;
    if (trivially_infeasible) {
      sol.status = QpStatus::InfeasibleDetected;
      sol.x = Eigen::VectorXd::Zero(n);
      sol.y = Eigen::VectorXd::Zero(m);
      sol.z = Eigen::VectorXd::Zero(m);
      return sol;
    }
    Iterates it;
    if (x0) {
      it.x = x0->cwiseQuotient(sx);
      it.y = c * y0->cwiseQuotient(sy);
      // Seed z with the projection of A x0 so the primal residual measures
      // genuine bound violation; otherwise a stale warm point would pass the
      // pre-loop termination test after a bound update.
      it.z = sy.cwiseProduct(clamp(orig.A * (*x0), orig.l, orig.u));
    } else {
      it.x = Eigen::VectorXd::Zero(n);
      it.y = Eigen::VectorXd::Zero(m);
      it.z = Eigen::VectorXd::Zero(m);
    }

    sol.status = QpStatus::MaxIter;
    // A warm start from the previous optimum should pass the very first
    // termination test and skip the loop entirely.
    if (x0 && converged(it, &sol)) {
      sol.status = QpStatus::Solved;
      sol.iterations = 0;
    } else {
      Eigen::VectorXd rhs(n + m), xt(n), nu(m), zt(m), z_prev(m), dy(m);
      for (int iter = 1; iter <= opts.max_iter; ++iter) {
        rhs.head(n) = opts.sigma * it.x - qs;
        rhs.tail(m) = it.z - rho_inv.cwiseProduct(it.y);
        const Eigen::VectorXd sol_kkt = ldlt.solve(rhs);
        xt = sol_kkt.head(n);
        nu = sol_kkt.tail(m);
        zt = it.z + rho_inv.cwiseProduct(nu - it.y);
        it.x = opts.alpha * xt + (1 - opts.alpha) * it.x;
        z_prev = it.z;
        it.z = clamp(opts.alpha * zt + (1 - opts.alpha) * z_prev +
                         rho_inv.cwiseProduct(it.y),
                     ls, us);
        dy = rho.cwiseProduct(opts.alpha * zt + (1 - opts.alpha) * z_prev -
                              it.z);
        it.y += dy;
        if (iter % opts.check_interval == 0 || iter == opts.max_iter) {
          double rho_est = rho_bar;
          if (converged(it, &sol, &rho_est)) {
            sol.status = QpStatus::Solved;
            sol.iterations = iter;
            break;
          }
          if (primal_infeasible(dy)) {
            sol.status = QpStatus::InfeasibleDetected;
            sol.iterations = iter;
            break;
          }
          if (opts.adaptive_rho && iter != opts.max_iter &&
              (rho_est > opts.adaptive_rho_tolerance * rho_bar ||
               rho_est < rho_bar / opts.adaptive_rho_tolerance)) {
            rho_bar = rho_est;
            apply_rho();
            factorize();
          }
        }
      }
      if (sol.status != QpStatus::Solved) {
        sol.x = sx.cwiseProduct(it.x);
        sol.y = sy.cwiseProduct(it.y) / c;
        sol.z = it.z.cwiseQuotient(sy);
        if (sol.status == QpStatus::MaxIter) sol.iterations = opts.max_iter;
      }
    }
    if (sol.status == QpStatus::Solved && opts.polish) polish(&sol);
    sol.objective = 0.5 * sol.x.dot(orig.P.selfadjointView<Eigen::Lower>() * sol.x) +
                    orig.q.dot(sol.x);
    return sol;
  }
};

QpSolver::QpSolver(QpProblem problem, QpSettings settings)
    : impl_(std::make_unique<Impl>(std::move(problem), settings)) {}
QpSolver::~QpSolver() = default;
QpSolver::QpSolver(QpSolver&&) noexcept = default;
QpSolver& QpSolver::operator=(QpSolver&&) noexcept = default;

void QpSolver::update_bounds(const Eigen::VectorXd& l, const Eigen::VectorXd& u) {
  if (l.size() != impl_->orig.m() || u.size() != impl_->orig.m()) {
    throw std::invalid_argument("bound vector length mismatch");
  }
  impl_->orig.l = l;
  impl_->orig.u = u;
  impl_->ls = impl_->sy.cwiseProduct(l);
  impl_->us = impl_->sy.cwiseProduct(u);
  impl_->trivially_infeasible = false;
  for (int j = 0; j < impl_->orig.m(); ++j) {
    if (l[j] > u[j] || l[j] == kInf || u[j] == -kInf) {
      impl_->trivially_infeasible = true;
    }
  }
}

QpSolution QpSolver::solve() { return impl_->run(nullptr, nullptr); }

QpSolution QpSolver::solve_warm(const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& y0) {
  if (x0.size() != impl_->orig.n() || y0.size() != impl_->orig.m()) {
    throw std::invalid_argument("warm start vector length mismatch");
  }
  return impl_->run(&x0, &y0);
}

const QpProblem& QpSolver::problem() const { return impl_->orig; }

QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings) {
  QpSolver solver(problem, settings);
  return solver.solve();
}

}  // namespace ucpce
