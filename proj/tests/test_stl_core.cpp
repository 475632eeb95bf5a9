#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "stlmpc/stl/formula.hpp"
#include "stlmpc/stl/monitor.hpp"
#include "stlmpc/stl/parse.hpp"

using namespace stlmpc;

namespace {

SignalTable table_xy() {
  SignalTable t;
  t.add("x1");
  t.add("q");
  return t;
}

Trajectory traj1(std::vector<double> vals, int base = 0) {
  Trajectory x;
  x.base_time = base;
  for (double v : vals) x.states.push_back({v});
  return x;
}

}  // namespace

TEST_CASE("parse: grammar examples") {
  SignalTable t = table_xy();

  auto f = parse_formula("G[0,30](5 - x1 >= 0)", t);
  REQUIRE(f->kind == NodeKind::Always);
  CHECK(f->lo == 0);
  CHECK(f->hi == 30);
  REQUIRE(f->children[0]->kind == NodeKind::Pred);
  CHECK(f->children[0]->pred.coeffs[0] == -1.0);
  CHECK(f->children[0]->pred.offset == 5.0);

  auto g = parse_formula("F[10,30](x1 >= 0) & G[0,2](q >= 1)", t);
  REQUIRE(g->kind == NodeKind::And);
  CHECK(g->children[0]->kind == NodeKind::Eventually);
  CHECK(g->children[1]->kind == NodeKind::Always);

  auto u = parse_formula("(x1 >= 0) U[1,5] (G[0,2](q >= 1))", t);
  REQUIRE(u->kind == NodeKind::Until);
  CHECK(u->lo == 1);
  CHECK(u->hi == 5);
  CHECK(u->children[1]->kind == NodeKind::Always);
}

TEST_CASE("parse: comparison senses and linear expressions") {
  SignalTable t = table_xy();
  auto f = parse_formula("2*x1 - 3 <= 0.5*q + 1", t);
  REQUIRE(f->kind == NodeKind::Pred);
  // <= flips: mu = rhs - lhs = 0.5 q + 1 - 2 x1 + 3
  CHECK(f->pred.coeffs[0] == -2.0);
  CHECK(f->pred.coeffs[1] == 0.5);
  CHECK(f->pred.offset == 4.0);
  CHECK_FALSE(f->pred.strict);

  auto s = parse_formula("x1 > 3", t);
  CHECK(s->pred.strict);
  CHECK(s->pred.offset == -3.0);

  auto l = parse_formula("x1 < 3", t);
  CHECK(l->pred.strict);
  CHECK(l->pred.coeffs[0] == -1.0);
  CHECK(l->pred.offset == 3.0);
}

TEST_CASE("parse: errors carry positions") {
  SignalTable t = table_xy();
  CHECK_THROWS_AS(parse_formula("G[0,2](x1 >= )", t), ParseError);
  CHECK_THROWS_AS(parse_formula("G[0,2](nope >= 0)", t), ParseError);
  CHECK_THROWS_AS(parse_formula("G[5,3](x1 >= 0)", t), ParseError);
  CHECK_THROWS_AS(parse_formula("G[-1,3](x1 >= 0)", t), ParseError);
  CHECK_THROWS_AS(parse_formula("x1 >= 0 extra", t), ParseError);

  try {
    parse_formula("G[0,2](nope >= 0)", t);
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(e.pos == 7);
    CHECK(std::string(e.what()).find("nope") != std::string::npos);
  }
}

TEST_CASE("formula_horizon: examples and recursion property") {
  SignalTable t = table_xy();
  CHECK(formula_horizon(parse_formula("G[0,30](x1 >= 0)", t)) == 30);
  CHECK(formula_horizon(parse_formula("x1 >= 0", t)) == 0);
  CHECK(formula_horizon(parse_formula("(x1 >= 0) U[1,5] (G[0,2](q >= 0))", t)) == 7);

  oracle::FormulaGen gen(42);
  for (int i = 0; i < 200; ++i) {
    auto f = gen.gen(4);
    CHECK(formula_horizon(*f) == oracle::horizon_recompute(*f));
  }
}

TEST_CASE("pad_to_common_horizon") {
  SignalTable t = table_xy();
  auto fq = parse_formula("G[0,2](q >= 0)", t);   // horizon 2
  auto fp = parse_formula("F[0,5](x1 >= 0)", t);  // horizon 5
  auto padded = pad_to_common_horizon({fq, fp});
  REQUIRE(padded.size() == 2);
  CHECK(padded[0]->kind == NodeKind::Always);
  CHECK(padded[0]->lo == 0);
  CHECK(padded[0]->hi == 3);
  CHECK(formula_horizon(*padded[0]) == 5);
  CHECK(padded[1] == fp);  // untouched

  auto single = pad_to_common_horizon({fp});
  CHECK(single[0] == fp);

  auto flat = pad_to_common_horizon({parse_formula("x1 >= 0", t), parse_formula("q >= 0", t)});
  CHECK(flat[0]->kind == NodeKind::Pred);
  CHECK(flat[1]->kind == NodeKind::Pred);

  auto wrapped = pad_to_common_horizon({fp}, /*wrap_all=*/true);
  CHECK(wrapped[0]->kind == NodeKind::Always);
  CHECK(wrapped[0]->hi == 0);
  CHECK(formula_horizon(*wrapped[0]) == 5);
}

TEST_CASE("push_negations: rewrite examples") {
  SignalTable t = table_xy();

  auto a = push_negations(parse_formula("!(G[0,3](x1 >= 0))", t));
  REQUIRE(a->kind == NodeKind::Eventually);
  CHECK(a->lo == 0);
  CHECK(a->hi == 3);
  REQUIRE(a->children[0]->kind == NodeKind::Pred);
  CHECK(a->children[0]->pred.coeffs[0] == -1.0);
  CHECK(a->children[0]->pred.strict);

  auto b = push_negations(parse_formula("!(!(x1 >= 0))", t));
  REQUIRE(b->kind == NodeKind::Pred);
  CHECK(b->pred.coeffs[0] == 1.0);
  CHECK_FALSE(b->pred.strict);

  auto c = push_negations(parse_formula("!(x1 >= 0 | q >= 0)", t));
  REQUIRE(c->kind == NodeKind::And);
  CHECK(c->children[0]->pred.coeffs[0] == -1.0);
  CHECK(c->children[1]->pred.coeffs[1] == -1.0);
}

TEST_CASE("push_negations: output is negation-free and preserves semantics") {
  oracle::FormulaGen gen(7);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    auto f = gen.gen(3);
    auto nnf = push_negations(f);
    // no Not nodes anywhere
    std::vector<FormulaPtr> stack{nnf};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      CHECK(cur->kind != NodeKind::Not);
      for (const auto& ch : cur->children) stack.push_back(ch);
    }
    CHECK(formula_horizon(*nnf) == formula_horizon(*f));
    auto x = gen.trajectory(formula_horizon(*f) + 1);
    CHECK(eval_boolean(nnf, x, 0) == oracle::oracle_boolean(f, x, 0));
    ++checked;
  }
  CHECK(checked == 150);
}

TEST_CASE("push_negations: negation duality of robustness") {
  oracle::FormulaGen gen(11);
  for (int i = 0; i < 150; ++i) {
    auto f = gen.gen(3);
    auto x = gen.trajectory(formula_horizon(*f) + 1);
    double rho = eval_robustness(push_negations(f), x, 0);
    double rho_neg = eval_robustness(push_negations(f_not(f)), x, 0);
    CHECK(rho_neg == -rho);
  }
}

TEST_CASE("eval_boolean: semantics examples") {
  SignalTable t;
  t.add("x");
  auto x = traj1({1, 2, -1});
  CHECK_FALSE(eval_boolean(parse_formula("G[0,2](x >= 0)", t), x, 0));
  auto y = traj1({-3, -1, 2});
  CHECK(eval_boolean(parse_formula("F[0,2](x >= 0)", t), y, 0));
  auto z = traj1({1, 1, 4});
  CHECK(eval_boolean(parse_formula("(x >= 0) U[1,2] (x >= 3)", t), z, 0));

  CHECK_THROWS_AS(eval_boolean(parse_formula("G[0,5](x >= 0)", t), x, 0), Error);
}

TEST_CASE("eval_robustness: semantics examples") {
  SignalTable t;
  t.add("x");
  CHECK(eval_robustness(parse_formula("G[0,2](x >= 0)", t), traj1({1, 2, -1}), 0) == -1.0);
  CHECK(eval_robustness(parse_formula("F[0,2](x >= 0)", t), traj1({-3, -1, 2}), 0) == 2.0);
  // until, boolean-table orientation: max over tau of min(rho2(tau), prefix rho1)
  CHECK(eval_robustness(parse_formula("(x >= 0) U[0,2] (x >= 3)", t), traj1({1, 2, 5}), 0) == 1.0);
}

TEST_CASE("eval_windows") {
  SignalTable t;
  t.add("x");
  auto f = parse_formula("G[0,1](x >= 0)", t);
  auto w = eval_windows(f, traj1({1, 2, 3}));
  REQUIRE(w.size() == 2);
  CHECK(w[0].t == 0);
  CHECK(w[0].satisfied);
  CHECK(w[0].robustness == 1.0);
  CHECK(w[1].t == 1);
  CHECK(w[1].robustness == 2.0);

  auto f30 = parse_formula("G[0,30](x >= 0)", t);
  std::vector<double> vals(31, 1.0);
  CHECK(eval_windows(f30, traj1(vals)).size() == 1);
  vals.resize(131, 1.0);
  CHECK(eval_windows(f30, traj1(vals)).size() == 101);
  vals.resize(5);
  CHECK(eval_windows(f30, traj1(vals)).empty());
}

TEST_CASE("monitor agrees with expansion oracle on random inputs") {
  oracle::FormulaGen gen(2024);
  int sign_checked = 0;
  for (int i = 0; i < 300; ++i) {
    auto f = gen.gen(4);
    int n = formula_horizon(*f);
    auto x = gen.trajectory(n + 1 + gen.integer(0, 2));
    int t = gen.integer(0, x.length() - 1 - n);
    bool b = eval_boolean(f, x, t);
    CHECK(b == oracle::oracle_boolean(f, x, t));

    auto nnf = push_negations(f);
    double rho = eval_robustness(nnf, x, t);
    CHECK(rho == oracle::oracle_robustness(nnf, x, t));
    if (std::fabs(rho) > 1e-9) {
      CHECK(b == (rho > 0));
      ++sign_checked;
    }
  }
  CHECK(sign_checked > 250);
}

TEST_CASE("robustness min/max structure") {
  oracle::FormulaGen gen(5);
  gen.with_not = false;
  for (int i = 0; i < 50; ++i) {
    auto a = gen.gen(2);
    auto b = gen.gen(2);
    auto both = f_and({a, b});
    auto either = f_or({a, b});
    int n = formula_horizon(*both);
    auto x = gen.trajectory(n + 3);
    CHECK(eval_robustness(both, x, 0) ==
          std::min(eval_robustness(a, x, 0), eval_robustness(b, x, 0)));
    CHECK(eval_robustness(either, x, 0) ==
          std::max(eval_robustness(a, x, 0), eval_robustness(b, x, 0)));
    auto alw = f_always(a, 0, 2);
    double m = std::numeric_limits<double>::infinity();
    for (int tau = 0; tau <= 2; ++tau) m = std::min(m, eval_robustness(a, x, tau));
    CHECK(eval_robustness(alw, x, 0) == m);
  }
}

TEST_CASE("parser round-trip") {
  SignalTable t = table_xy();
  for (const char* s : {"G[0,30](5 - x1 >= 0)", "F[10,30](x1 >= 0) & G[0,2](q >= 1)",
                        "(x1 >= 0) U[1,5] (G[0,2](q >= 1))", "!(x1 >= 0) | q - 0.25 > 0"}) {
    auto f = parse_formula(s, t);
    auto g = parse_formula(to_string(f, t), t);
    CHECK(structurally_equal(*f, *g));
  }

  oracle::FormulaGen gen(99);
  SignalTable rt;
  rt.add("a");
  rt.add("b");
  rt.add("c");
  for (int i = 0; i < 200; ++i) {
    auto f = gen.gen(4);
    auto printed = to_string(f, rt);
    auto g = parse_formula(printed, rt);
    INFO(printed);
    CHECK(structurally_equal(*f, *g));
  }
}
