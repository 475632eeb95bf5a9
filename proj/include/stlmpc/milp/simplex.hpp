#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stlmpc/milp/instance.hpp"

namespace stlmpc {

struct SimplexOptions {
  double feas_tol = 1e-7;
  double pivot_tol = 1e-9;
  double cost_tol = 1e-9;
  long iter_limit = 0;  // 0: derived from problem size
};

struct LpRow {
  std::vector<LinTerm> terms;
  ConSense sense = ConSense::LE;
  double rhs = 0.0;
};

/// LP in structural form. Bounds may be infinite; lb == ub fixes a variable.
struct LpProblem {
  std::vector<double> lb, ub, obj;
  std::vector<LpRow> rows;
  int num_vars() const { return static_cast<int>(lb.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double obj = 0.0;
  Vec duals;          // one multiplier per row
  Vec reduced_costs;  // structural columns
  long iterations = 0;
};

/// Primal simplex for bounded variables, full-tableau form with artificial
/// variables in phase 1. Dantzig pricing with a Bland fallback after a run of
/// degenerate pivots; deterministic tie-breaking by lowest column index.
class Simplex {
public:
  LpResult solve(const LpProblem& p, const SimplexOptions& opt = {}) {
    init(p, opt);
    LpResult res;

    // Phase 1: minimize sum of artificials.
    if (num_artificial_ > 0) {
      Phase phase = Phase::One;
      if (!iterate(phase, res)) return res;  // iteration/cycling failure throws inside
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i)
        if (is_artificial(basic_[i])) infeas += beta_[i];
      if (infeas > opt_.feas_tol * std::max(1.0, rhs_scale_)) {
        res.status = LpStatus::Infeasible;
        res.iterations = iters_;
        return res;
      }
      drive_out_artificials();
      for (int j = col_art_; j < cols_; ++j) {
        lb_[j] = ub_[j] = 0.0;  // artificials may never return
      }
    }

    Phase phase = Phase::Two;
    if (!iterate(phase, res)) {
      res.iterations = iters_;
      return res;
    }
    extract(res);
    return res;
  }

private:
  enum class Phase { One, Two };
  enum ColState : uint8_t { AtLower, AtUpper, FreeZero, Basic };

  SimplexOptions opt_;
  int n_ = 0, m_ = 0, cols_ = 0, col_slack_ = 0, col_art_ = 0, num_artificial_ = 0;
  double rhs_scale_ = 1.0;
  std::vector<double> tab_;       // m_ x cols_, row-major
  std::vector<double> zrow_;      // phase-2 reduced costs
  std::vector<double> z1row_;     // phase-1 reduced costs
  std::vector<double> beta_;      // value of the basic variable of each row
  std::vector<double> lb_, ub_, val_, cost_;
  std::vector<int> basic_;        // row -> column
  std::vector<ColState> state_;
  long iters_ = 0;
  long degenerate_run_ = 0;
  bool bland_ = false;

  double& tab(int r, int c) { return tab_[static_cast<size_t>(r) * cols_ + c]; }

  bool is_artificial(int j) const { return j >= col_art_; }
  bool fixed_col(int j) const { return lb_[j] == ub_[j]; }

  void init(const LpProblem& p, const SimplexOptions& opt) {
    opt_ = opt;
    n_ = p.num_vars();
    m_ = static_cast<int>(p.rows.size());
    col_slack_ = n_;

    // Pass 1: nonbasic values for structural columns.
    lb_.assign(p.lb.begin(), p.lb.end());
    ub_.assign(p.ub.begin(), p.ub.end());
    cost_.assign(p.obj.begin(), p.obj.end());
    val_.assign(n_, 0.0);
    state_.assign(n_, AtLower);
    for (int j = 0; j < n_; ++j) {
      if (lb_[j] > ub_[j]) throw Error("simplex: variable with empty bound range");
      if (std::isfinite(lb_[j])) {
        val_[j] = lb_[j];
        state_[j] = AtLower;
      } else if (std::isfinite(ub_[j])) {
        val_[j] = ub_[j];
        state_[j] = AtUpper;
      } else {
        val_[j] = 0.0;
        state_[j] = FreeZero;
      }
    }

    // Slack bounds per sense; initial residuals decide which rows need an
    // artificial column.
    std::vector<double> resid(m_, 0.0);
    std::vector<int8_t> needs_art(m_, 0);
    std::vector<int8_t> flip(m_, 0);
    num_artificial_ = 0;
    rhs_scale_ = 1.0;
    for (int i = 0; i < m_; ++i) {
      const LpRow& row = p.rows[i];
      double act = 0.0;
      for (const auto& t : row.terms) act += t.coef * val_[t.var];
      double sl = row.rhs - act;
      double slo = row.sense == ConSense::LE ? 0.0 : (row.sense == ConSense::EQ ? 0.0 : -kInf);
      double shi = row.sense == ConSense::GE ? 0.0 : (row.sense == ConSense::EQ ? 0.0 : kInf);
      resid[i] = sl;
      rhs_scale_ = std::max(rhs_scale_, std::fabs(row.rhs));
      if (sl < slo - opt_.feas_tol || sl > shi + opt_.feas_tol) {
        needs_art[i] = 1;
        // The slack parks at its finite bound (always 0 here); the row is
        // negated when needed so the artificial enters with +1 and value > 0.
        flip[i] = sl < 0.0 ? 1 : 0;
        ++num_artificial_;
      }
    }

    col_art_ = n_ + m_;
    cols_ = col_art_ + num_artificial_;
    tab_.assign(static_cast<size_t>(m_) * cols_, 0.0);
    zrow_.assign(cols_, 0.0);
    z1row_.assign(cols_, 0.0);
    beta_.assign(m_, 0.0);
    basic_.assign(m_, -1);
    lb_.resize(cols_, 0.0);
    ub_.resize(cols_, 0.0);
    val_.resize(cols_, 0.0);
    cost_.resize(cols_, 0.0);
    state_.resize(cols_, AtLower);

    int art = col_art_;
    for (int i = 0; i < m_; ++i) {
      const LpRow& row = p.rows[i];
      double sgn = flip[i] ? -1.0 : 1.0;
      for (const auto& t : row.terms) tab(i, t.var) += sgn * t.coef;
      int sj = col_slack_ + i;
      tab(i, sj) = sgn;
      lb_[sj] = row.sense == ConSense::GE ? -kInf : 0.0;
      ub_[sj] = row.sense == ConSense::LE ? kInf : 0.0;
      cost_[sj] = 0.0;
      if (needs_art[i]) {
        double slack_at = resid[i] > (row.sense == ConSense::LE ? kInf : 0.0) ? 0.0 : 0.0;
        // park the slack at the bound nearest its residual
        double park;
        if (row.sense == ConSense::EQ)
          park = 0.0;
        else if (row.sense == ConSense::LE)
          park = resid[i] > 0.0 ? 0.0 : 0.0;
        else
          park = 0.0;
        (void)slack_at;
        val_[sj] = park;
        state_[sj] = std::isfinite(lb_[sj]) && park == lb_[sj] ? AtLower : AtUpper;
        if (!std::isfinite(lb_[sj]) && park == 0.0 && !std::isfinite(ub_[sj])) state_[sj] = FreeZero;
        tab(i, art) = 1.0;
        lb_[art] = 0.0;
        ub_[art] = kInf;
        val_[art] = 0.0;
        basic_[i] = art;
        state_[art] = Basic;
        beta_[i] = sgn * (resid[i] - park);
        ++art;
      } else {
        val_[sj] = 0.0;
        basic_[i] = sj;
        state_[sj] = Basic;
        beta_[i] = sgn * resid[i];
      }
    }

    // Reduced cost rows. Initial basis: slacks (cost 0) and artificials
    // (phase-1 cost 1), so z = c and z1_j = -sum over artificial rows.
    for (int j = 0; j < cols_; ++j) zrow_[j] = cost_[j];
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basic_[i])) continue;
      for (int j = 0; j < cols_; ++j) z1row_[j] -= tab(i, j);
    }
    for (int i = 0; i < m_; ++i) z1row_[basic_[i]] = 0.0;

    iters_ = 0;
    degenerate_run_ = 0;
    bland_ = false;
    if (opt_.iter_limit <= 0) opt_.iter_limit = 20000 + 50L * (m_ + cols_);
  }

  // Parking slacks: for rows that get an artificial, the slack sits at the
  // finite bound nearest the residual (0 for all senses here since slack
  // bounds are one-sided at 0).

  bool eligible_entering(int j, const std::vector<double>& z, double& dir) const {
    if (state_[j] == Basic || fixed_col(j)) return false;
    if (is_artificial(j)) return false;
    double d = z[j];
    if (state_[j] == AtLower) {
      if (d < -opt_.cost_tol) {
        dir = 1.0;
        return true;
      }
      return false;
    }
    if (state_[j] == AtUpper) {
      if (d > opt_.cost_tol) {
        dir = -1.0;
        return true;
      }
      return false;
    }
    // free at zero
    if (d < -opt_.cost_tol) {
      dir = 1.0;
      return true;
    }
    if (d > opt_.cost_tol) {
      dir = -1.0;
      return true;
    }
    return false;
  }

  /// Runs pivots until the current phase's objective is optimal.
  /// Returns false (with res filled) on unbounded phase-2.
  bool iterate(Phase phase, LpResult& res) {
    std::vector<double>& z = phase == Phase::One ? z1row_ : zrow_;
    for (;;) {
      if (iters_ >= opt_.iter_limit)
        throw Error("simplex cycling guard tripped after " + std::to_string(iters_) +
                    " iterations");
      // entering column
      int q = -1;
      double qdir = 0.0, best = 0.0;
      for (int j = 0; j < cols_; ++j) {
        double dir;
        if (!eligible_entering(j, z, dir)) continue;
        if (bland_) {
          q = j;
          qdir = dir;
          break;
        }
        double score = std::fabs(z[j]);
        if (score > best + 1e-15) {
          best = score;
          q = j;
          qdir = dir;
        }
      }
      if (q < 0) return true;  // phase optimal

      // ratio test over the entering column
      double limit = kInf;
      if (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) limit = ub_[q] - lb_[q];
      int leave_row = -1;
      double leave_to = 0.0;  // bound the leaving variable lands on
      for (int i = 0; i < m_; ++i) {
        double a = tab(i, q);
        if (std::fabs(a) <= opt_.pivot_tol) continue;
        int k = basic_[i];
        double rate = -qdir * a;  // d beta_i / d step
        double room, target;
        if (rate > 0) {
          if (!std::isfinite(ub_[k])) continue;
          room = ub_[k] - beta_[i];
          target = ub_[k];
        } else {
          if (!std::isfinite(lb_[k])) continue;
          room = beta_[i] - lb_[k];
          target = lb_[k];
        }
        double ratio = std::max(0.0, room) / std::fabs(rate);
        bool better = ratio < limit - 1e-12;
        bool tie = std::fabs(ratio - limit) <= 1e-12;
        // deterministic tie-break: prefer larger pivot magnitude, then lower index
        if (better || (tie && leave_row >= 0 &&
                       (std::fabs(a) > std::fabs(tab(leave_row, q)) + 1e-12 ||
                        (std::fabs(std::fabs(a) - std::fabs(tab(leave_row, q))) <= 1e-12 &&
                         k < basic_[leave_row])))) {
          limit = ratio;
          leave_row = i;
          leave_to = target;
        } else if (tie && leave_row < 0) {
          limit = std::min(limit, ratio);
          leave_row = i;
          leave_to = target;
        }
      }

      if (!std::isfinite(limit)) {
        if (phase == Phase::One) throw Error("simplex: unbounded phase-1 (internal error)");
        res.status = LpStatus::Unbounded;
        res.iterations = iters_;
        return false;
      }

      ++iters_;
      if (limit <= opt_.feas_tol) {
        ++degenerate_run_;
        if (!bland_ && degenerate_run_ > 3L * (m_ + cols_)) bland_ = true;
      } else {
        degenerate_run_ = 0;
        bland_ = false;
      }

      if (leave_row < 0) {
        // bound-to-bound flip of the entering variable
        for (int i = 0; i < m_; ++i) beta_[i] -= qdir * limit * tab(i, q);
        val_[q] += qdir * limit;
        state_[q] = qdir > 0 ? AtUpper : AtLower;
        continue;
      }

      // move basics, then pivot on (leave_row, q)
      double step = limit;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        beta_[i] -= qdir * step * tab(i, q);
      }
      int old_basic = basic_[leave_row];
      double enter_val = val_[q] + qdir * step;
      val_[old_basic] = leave_to;
      state_[old_basic] = (std::isfinite(lb_[old_basic]) && leave_to == lb_[old_basic])
                              ? AtLower
                              : AtUpper;
      if (lb_[old_basic] == ub_[old_basic]) state_[old_basic] = AtLower;

      pivot(leave_row, q);
      basic_[leave_row] = q;
      state_[q] = Basic;
      beta_[leave_row] = enter_val;
    }
  }

  void pivot(int r, int q) {
    double* rowr = &tab_[static_cast<size_t>(r) * cols_];
    double piv = rowr[q];
    if (std::fabs(piv) <= opt_.pivot_tol)
      throw Error("simplex: pivot element below tolerance (internal error)");
    double inv = 1.0 / piv;
    for (int j = 0; j < cols_; ++j) rowr[j] *= inv;
    rowr[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* rowi = &tab_[static_cast<size_t>(i) * cols_];
      double f = rowi[q];
      if (f == 0.0) continue;
      for (int j = 0; j < cols_; ++j) rowi[j] -= f * rowr[j];
      rowi[q] = 0.0;
    }
    auto update_cost = [&](std::vector<double>& z) {
      double f = z[q];
      if (f == 0.0) return;
      for (int j = 0; j < cols_; ++j) z[j] -= f * rowr[j];
      z[q] = 0.0;
    };
    update_cost(zrow_);
    update_cost(z1row_);
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basic_[i])) continue;
      int q = -1;
      for (int j = 0; j < col_art_; ++j) {
        if (state_[j] == Basic || fixed_col(j)) continue;
        if (std::fabs(tab(i, j)) > 1e-7) {
          q = j;
          break;
        }
      }
      if (q < 0) continue;  // redundant row; artificial stays basic at ~0
      int old_basic = basic_[i];
      val_[old_basic] = 0.0;
      state_[old_basic] = AtLower;
      double keep = beta_[i];
      pivot(i, q);
      basic_[i] = q;
      state_[q] = Basic;
      beta_[i] = keep / 1.0;  // value unchanged by re-expression
    }
  }

  void extract(LpResult& res) {
    res.status = LpStatus::Optimal;
    res.iterations = iters_;
    res.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      if (state_[j] != Basic) res.x[j] = val_[j];
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < n_) res.x[basic_[i]] = beta_[i];
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lb_[j])) res.x[j] = std::max(res.x[j], lb_[j]);
      if (std::isfinite(ub_[j])) res.x[j] = std::min(res.x[j], ub_[j]);
    }
    res.obj = 0.0;
    for (int j = 0; j < n_; ++j) res.obj += cost_[j] * res.x[j];
    // duals from slack reduced costs; reduced costs for structural columns
    res.duals.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) res.duals[i] = -zrow_[col_slack_ + i];
    res.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) res.reduced_costs[j] = state_[j] == Basic ? 0.0 : zrow_[j];
  }
};

}  // namespace stlmpc
