#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "stlmpc/common.hpp"

namespace stlmpc {

/// Maps formula signal names to indices into state vectors.
struct SignalTable {
  std::vector<std::string> names;

  int index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
  }
  int add(const std::string& name) {
    int idx = index_of(name);
    if (idx >= 0) return idx;
    names.push_back(name);
    return static_cast<int>(names.size()) - 1;
  }
  int size() const { return static_cast<int>(names.size()); }
};

/// Affine predicate mu(x) = coeffs'x + offset. Holds iff mu(x) >= 0, or
/// mu(x) > 0 when `strict` is set (strict forms arise from negation only).
/// A predicate with all-zero coefficients is the constant true/false.
struct LinearPredicate {
  std::vector<double> coeffs;
  double offset = 0.0;
  bool strict = false;

  double eval(std::span<const double> x) const {
    double s = offset;
    for (size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i] == 0.0) continue;
      if (i >= x.size()) throw Error("predicate references dimension beyond state size");
      s += coeffs[i] * x[i];
    }
    return s;
  }

  bool holds(std::span<const double> x) const {
    double mu = eval(x);
    return strict ? mu > 0.0 : mu >= 0.0;
  }

  LinearPredicate negated() const {
    LinearPredicate p;
    p.coeffs.resize(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) p.coeffs[i] = -coeffs[i];
    p.offset = -offset;
    p.strict = !strict;
    return p;
  }

  bool is_constant() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
  }

  bool operator==(const LinearPredicate& o) const {
    return coeffs == o.coeffs && offset == o.offset && strict == o.strict;
  }
};

enum class NodeKind { True, Pred, Not, And, Or, Until, Always, Eventually };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable AST node of a bounded-time STL formula.
struct Formula {
  NodeKind kind = NodeKind::True;
  LinearPredicate pred;             // Pred only
  std::vector<FormulaPtr> children; // Not: 1, And/Or: >= 2, Until: 2, Always/Eventually: 1
  int lo = 0, hi = 0;               // interval [lo, hi] for temporal nodes
};

inline FormulaPtr f_true() {
  static const FormulaPtr t = std::make_shared<Formula>();
  return t;
}

inline FormulaPtr f_false() {
  LinearPredicate p;
  p.offset = -std::numeric_limits<double>::infinity();
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::Pred;
  f->pred = std::move(p);
  return f;
}

inline FormulaPtr f_pred(LinearPredicate p) {
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::Pred;
  f->pred = std::move(p);
  return f;
}

inline FormulaPtr f_not(FormulaPtr c) {
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::Not;
  f->children = {std::move(c)};
  return f;
}

namespace detail {
inline FormulaPtr make_nary(NodeKind kind, std::vector<FormulaPtr> cs) {
  if (cs.empty()) throw Error("boolean connective needs at least one operand");
  if (cs.size() == 1) return cs[0];
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->children = std::move(cs);
  return f;
}
inline void check_interval(int a, int b) {
  if (a < 0 || b < a) throw Error("temporal interval must satisfy 0 <= a <= b");
}
}  // namespace detail

inline FormulaPtr f_and(std::vector<FormulaPtr> cs) { return detail::make_nary(NodeKind::And, std::move(cs)); }
inline FormulaPtr f_or(std::vector<FormulaPtr> cs) { return detail::make_nary(NodeKind::Or, std::move(cs)); }

inline FormulaPtr f_until(FormulaPtr lhs, FormulaPtr rhs, int a, int b) {
  detail::check_interval(a, b);
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::Until;
  f->children = {std::move(lhs), std::move(rhs)};
  f->lo = a;
  f->hi = b;
  return f;
}

inline FormulaPtr f_always(FormulaPtr c, int a, int b) {
  detail::check_interval(a, b);
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::Always;
  f->children = {std::move(c)};
  f->lo = a;
  f->hi = b;
  return f;
}

inline FormulaPtr f_eventually(FormulaPtr c, int a, int b) {
  detail::check_interval(a, b);
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::Eventually;
  f->children = {std::move(c)};
  f->lo = a;
  f->hi = b;
  return f;
}

/// Number of future steps the formula's truth at time t depends on:
/// N^p = 0, N^(not phi) = N^phi, N^(and/or) = max of children,
/// N^(G/F [a,b] phi) = b + N^phi, N^(phi1 U[a,b] phi2) = b + max(N1, N2).
inline int formula_horizon(const Formula& f) {
  switch (f.kind) {
    case NodeKind::True:
    case NodeKind::Pred:
      return 0;
    case NodeKind::Not:
      return formula_horizon(*f.children[0]);
    case NodeKind::And:
    case NodeKind::Or: {
      int n = 0;
      for (const auto& c : f.children) n = std::max(n, formula_horizon(*c));
      return n;
    }
    case NodeKind::Always:
    case NodeKind::Eventually:
      return f.hi + formula_horizon(*f.children[0]);
    case NodeKind::Until:
      return f.hi + std::max(formula_horizon(*f.children[0]), formula_horizon(*f.children[1]));
  }
  throw Error("unreachable");
}

inline int formula_horizon(const FormulaPtr& f) { return formula_horizon(*f); }

inline bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.lo != b.lo || a.hi != b.hi) return false;
  if (a.kind == NodeKind::Pred && !(a.pred == b.pred)) return false;
  if (a.children.size() != b.children.size()) return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

/// Rewrites to negation normal form: Not survives nowhere (negated predicates
/// are folded into the predicate itself via sign flip + strictness toggle).
/// Negated Until is expanded through its bounded dual:
///   !(p U[a,b] q)  =  AND_{tau in [a,b]} ( F[0,tau](!p)  |  F[tau,tau](!q) ).
inline FormulaPtr push_negations(const FormulaPtr& f, bool negate = false) {
  switch (f->kind) {
    case NodeKind::True:
      return negate ? f_false() : f;
    case NodeKind::Pred:
      return negate ? f_pred(f->pred.negated()) : f;
    case NodeKind::Not:
      return push_negations(f->children[0], !negate);
    case NodeKind::And:
    case NodeKind::Or: {
      std::vector<FormulaPtr> cs;
      cs.reserve(f->children.size());
      for (const auto& c : f->children) cs.push_back(push_negations(c, negate));
      bool is_and = (f->kind == NodeKind::And) != negate;
      return is_and ? f_and(std::move(cs)) : f_or(std::move(cs));
    }
    case NodeKind::Always: {
      auto c = push_negations(f->children[0], negate);
      return negate ? f_eventually(std::move(c), f->lo, f->hi) : f_always(std::move(c), f->lo, f->hi);
    }
    case NodeKind::Eventually: {
      auto c = push_negations(f->children[0], negate);
      return negate ? f_always(std::move(c), f->lo, f->hi) : f_eventually(std::move(c), f->lo, f->hi);
    }
    case NodeKind::Until: {
      auto l = push_negations(f->children[0], negate);
      auto r = push_negations(f->children[1], negate);
      if (!negate) return f_until(std::move(l), std::move(r), f->lo, f->hi);
      std::vector<FormulaPtr> conjuncts;
      for (int tau = f->lo; tau <= f->hi; ++tau) {
        std::vector<FormulaPtr> alts;
        alts.push_back(f_eventually(l, 0, tau));
        alts.push_back(f_eventually(r, tau, tau));
        conjuncts.push_back(f_or(std::move(alts)));
      }
      return f_and(std::move(conjuncts));
    }
  }
  throw Error("unreachable");
}

/// Wraps each formula in G[0, N - N_i] so all horizons equal N = max N_i.
/// Formulas already at horizon N are left unchanged unless `wrap_all` is set,
/// in which case they are wrapped in G[0,0] for uniform shape.
inline std::vector<FormulaPtr> pad_to_common_horizon(const std::vector<FormulaPtr>& fs,
                                                     bool wrap_all = false) {
  if (fs.empty()) throw Error("pad_to_common_horizon: empty formula list");
  int n = 0;
  for (const auto& f : fs) n = std::max(n, formula_horizon(*f));
  std::vector<FormulaPtr> out;
  out.reserve(fs.size());
  for (const auto& f : fs) {
    int ni = formula_horizon(*f);
    if (ni == n && !wrap_all)
      out.push_back(f);
    else
      out.push_back(f_always(f, 0, n - ni));
  }
  return out;
}

inline void collect_predicates(const FormulaPtr& f, std::vector<LinearPredicate>& out) {
  if (f->kind == NodeKind::Pred) out.push_back(f->pred);
  for (const auto& c : f->children) collect_predicates(c, out);
}

}  // namespace stlmpc
