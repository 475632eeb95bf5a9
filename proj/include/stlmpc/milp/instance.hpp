#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stlmpc/common.hpp"
#include "stlmpc/linalg.hpp"

namespace stlmpc {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class ConSense { LE, EQ, GE };

struct LinTerm {
  int var = -1;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  double lb = -kInf;
  double ub = kInf;
  VarKind kind = VarKind::Continuous;
};

struct Constraint {
  std::vector<LinTerm> terms;
  ConSense sense = ConSense::LE;
  double rhs = 0.0;
  std::string name;
};

enum class VarRole { State, Input, BinaryLiteral, Auxiliary };

/// Per-variable tags: which agent/time/dimension a state or input variable
/// belongs to. Times are offsets k into the prediction window of the step the
/// program was built for.
struct VarMeta {
  VarRole role = VarRole::Auxiliary;
  int agent = -1;
  int time = -1;
  int dim = -1;
};

/// Solver-agnostic mixed-integer linear program, objective sense: minimize.
struct MilpInstance {
  std::vector<Variable> vars;
  std::vector<VarMeta> meta;
  std::vector<Constraint> cons;
  std::vector<LinTerm> objective;

  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_cons() const { return static_cast<int>(cons.size()); }
  int num_binaries() const {
    int n = 0;
    for (const auto& v : vars) n += v.kind == VarKind::Binary;
    return n;
  }

  int add_var(const std::string& name, double lb, double ub, VarKind kind, VarMeta m = {}) {
    if (kind == VarKind::Binary) {
      lb = std::max(lb, 0.0);
      ub = std::min(ub, 1.0);
      if (m.role == VarRole::Auxiliary) m.role = VarRole::BinaryLiteral;
    }
    vars.push_back({name, lb, ub, kind});
    meta.push_back(m);
    return num_vars() - 1;
  }

  int add_con(std::vector<LinTerm> terms, ConSense sense, double rhs, std::string name = {}) {
    cons.push_back({std::move(terms), sense, rhs, std::move(name)});
    return num_cons() - 1;
  }

  void add_objective_term(int var, double coef) { objective.push_back({var, coef}); }

  void validate() const {
    for (const auto& c : cons)
      for (const auto& t : c.terms)
        if (t.var < 0 || t.var >= num_vars())
          throw Error("constraint '" + c.name + "' references undeclared variable");
    for (const auto& t : objective)
      if (t.var < 0 || t.var >= num_vars()) throw Error("objective references undeclared variable");
    for (const auto& v : vars) {
      if (v.lb > v.ub) throw Error("variable '" + v.name + "' has empty bound range");
      if (v.kind == VarKind::Binary && (v.lb < 0.0 || v.ub > 1.0))
        throw Error("binary variable '" + v.name + "' has bounds outside [0,1]");
    }
  }

  double eval_objective(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : objective) s += t.coef * x[t.var];
    return s;
  }
};

inline double row_activity(const Constraint& c, std::span<const double> x) {
  double a = 0.0;
  for (const auto& t : c.terms) a += t.coef * x[t.var];
  return a;
}

/// Amount by which the assignment violates the row (0 when satisfied).
inline double row_violation(const Constraint& c, std::span<const double> x) {
  double a = row_activity(c, x);
  switch (c.sense) {
    case ConSense::LE:
      return std::max(0.0, a - c.rhs);
    case ConSense::GE:
      return std::max(0.0, c.rhs - a);
    case ConSense::EQ:
      return std::fabs(a - c.rhs);
  }
  return 0.0;
}

/// Checks bounds, rows and binary integrality; fills `why` with the first
/// offender when given.
inline bool check_feasible(const MilpInstance& inst, std::span<const double> x, double tol,
                           double int_tol = 1e-6, std::string* why = nullptr) {
  for (int j = 0; j < inst.num_vars(); ++j) {
    const auto& v = inst.vars[j];
    if (x[j] < v.lb - tol || x[j] > v.ub + tol) {
      if (why) *why = "bound violated on " + v.name;
      return false;
    }
    if (v.kind == VarKind::Binary && std::fabs(x[j] - std::round(x[j])) > int_tol) {
      if (why) *why = "integrality violated on " + v.name;
      return false;
    }
  }
  for (const auto& c : inst.cons) {
    if (row_violation(c, x) > tol) {
      if (why) *why = "row violated: " + (c.name.empty() ? std::string("<unnamed>") : c.name);
      return false;
    }
  }
  return true;
}

}  // namespace stlmpc
