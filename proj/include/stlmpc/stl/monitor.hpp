#pragma once

#include <limits>

#include "stlmpc/linalg.hpp"
#include "stlmpc/stl/formula.hpp"

namespace stlmpc {

/// Discrete-time trajectory: states at base_time, base_time+1, ...
struct Trajectory {
  int base_time = 0;
  std::vector<Vec> states;

  int length() const { return static_cast<int>(states.size()); }
  int end_time() const { return base_time + length() - 1; }

  const Vec& at(int t) const {
    int i = t - base_time;
    if (i < 0 || i >= length()) throw Error("trajectory has no state at time " + std::to_string(t));
    return states[i];
  }
};

namespace detail {

inline bool eval_bool_rec(const Formula& f, const Trajectory& x, int t) {
  switch (f.kind) {
    case NodeKind::True:
      return true;
    case NodeKind::Pred:
      return f.pred.holds(x.at(t));
    case NodeKind::Not:
      return !eval_bool_rec(*f.children[0], x, t);
    case NodeKind::And:
      for (const auto& c : f.children)
        if (!eval_bool_rec(*c, x, t)) return false;
      return true;
    case NodeKind::Or:
      for (const auto& c : f.children)
        if (eval_bool_rec(*c, x, t)) return true;
      return false;
    case NodeKind::Always:
      for (int tau = t + f.lo; tau <= t + f.hi; ++tau)
        if (!eval_bool_rec(*f.children[0], x, tau)) return false;
      return true;
    case NodeKind::Eventually:
      for (int tau = t + f.lo; tau <= t + f.hi; ++tau)
        if (eval_bool_rec(*f.children[0], x, tau)) return true;
      return false;
    case NodeKind::Until:
      // exists tau in [t+a, t+b] with phi2 at tau and phi1 on all of [t, tau]
      for (int tau = t + f.lo; tau <= t + f.hi; ++tau) {
        if (!eval_bool_rec(*f.children[1], x, tau)) continue;
        bool prefix = true;
        for (int s = t; s <= tau && prefix; ++s) prefix = eval_bool_rec(*f.children[0], x, s);
        if (prefix) return true;
      }
      return false;
  }
  throw Error("unreachable");
}

inline double eval_rho_rec(const Formula& f, const Trajectory& x, int t) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  switch (f.kind) {
    case NodeKind::True:
      return kInf;
    case NodeKind::Pred:
      return f.pred.eval(x.at(t));
    case NodeKind::Not:
      if (f.children[0]->kind != NodeKind::Pred)
        throw Error("robustness needs negation normal form; run push_negations first");
      return -f.children[0]->pred.eval(x.at(t));
    case NodeKind::And: {
      double r = kInf;
      for (const auto& c : f.children) r = std::min(r, eval_rho_rec(*c, x, t));
      return r;
    }
    case NodeKind::Or: {
      double r = -kInf;
      for (const auto& c : f.children) r = std::max(r, eval_rho_rec(*c, x, t));
      return r;
    }
    case NodeKind::Always: {
      double r = kInf;
      for (int tau = t + f.lo; tau <= t + f.hi; ++tau)
        r = std::min(r, eval_rho_rec(*f.children[0], x, tau));
      return r;
    }
    case NodeKind::Eventually: {
      double r = -kInf;
      for (int tau = t + f.lo; tau <= t + f.hi; ++tau)
        r = std::max(r, eval_rho_rec(*f.children[0], x, tau));
      return r;
    }
    case NodeKind::Until: {
      // max over tau of min(rho(phi2, tau), min over [t, tau] of rho(phi1)),
      // the orientation consistent with the boolean semantics.
      double best = -kInf;
      double prefix = kInf;
      for (int tau = t; tau <= t + f.hi; ++tau) {
        prefix = std::min(prefix, eval_rho_rec(*f.children[0], x, tau));
        if (tau < t + f.lo) continue;
        best = std::max(best, std::min(eval_rho_rec(*f.children[1], x, tau), prefix));
      }
      return best;
    }
  }
  throw Error("unreachable");
}

inline void check_window(const Formula& f, const Trajectory& x, int t) {
  int n = formula_horizon(f);
  if (t < x.base_time || t + n > x.end_time())
    throw Error("trajectory too short: formula at t=" + std::to_string(t) + " needs states up to " +
                std::to_string(t + n) + " but trajectory covers [" + std::to_string(x.base_time) +
                ", " + std::to_string(x.end_time()) + "]");
}

}  // namespace detail

/// Boolean satisfaction of f over the trajectory window starting at t.
inline bool eval_boolean(const Formula& f, const Trajectory& x, int t) {
  detail::check_window(f, x, t);
  return detail::eval_bool_rec(f, x, t);
}
inline bool eval_boolean(const FormulaPtr& f, const Trajectory& x, int t) {
  return eval_boolean(*f, x, t);
}

/// Quantitative robustness of f (in negation normal form) at t.
/// Positive implies boolean satisfaction, negative implies violation.
inline double eval_robustness(const Formula& f, const Trajectory& x, int t) {
  detail::check_window(f, x, t);
  return detail::eval_rho_rec(f, x, t);
}
inline double eval_robustness(const FormulaPtr& f, const Trajectory& x, int t) {
  return eval_robustness(*f, x, t);
}

struct WindowVerdict {
  int t = 0;
  bool satisfied = false;
  double robustness = 0.0;
};

/// Evaluates every complete window of f along the trajectory. Used to check
/// the recurring task G[0,inf) f on finite closed-loop runs.
inline std::vector<WindowVerdict> eval_windows(const FormulaPtr& f, const Trajectory& x) {
  std::vector<WindowVerdict> out;
  int n = formula_horizon(*f);
  auto nnf = push_negations(f);
  for (int t = x.base_time; t + n <= x.end_time(); ++t)
    out.push_back({t, detail::eval_bool_rec(*f, x, t), detail::eval_rho_rec(*nnf, x, t)});
  return out;
}

}  // namespace stlmpc
