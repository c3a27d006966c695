#include "doctest.h"
#include "tsn/errors.hpp"
#include "tsn/expr.hpp"

using namespace tsn;

TEST_CASE("constants fold and negatives print in prefix form") {
  CHECK(to_smtlib(int_const(3) + int_const(4)) == "7");
  CHECK(to_smtlib(int_const(-5)) == "(- 5)");
  CHECK(to_smtlib(int_var("x") - 2) == "(+ x (- 2))");
  CHECK(to_smtlib(int_var("x") * 1) == "x");
  CHECK(to_smtlib(int_var("x") * 0) == "0");
  CHECK(to_smtlib(sum({})) == "0");
}

TEST_CASE("sums flatten nested sums") {
  const Term x = int_var("x");
  const Term y = int_var("y");
  const Term t = sum({x + 1, y + 2, int_const(3)});
  CHECK(to_smtlib(t) == "(+ x y 6)");
}

TEST_CASE("junctions short-circuit on constants and flatten") {
  const Term p = bool_var("p");
  const Term q = bool_var("q");
  CHECK(to_smtlib(conj({p, bool_const(true), q})) == "(and p q)");
  CHECK(to_smtlib(conj({p, bool_const(false)})) == "false");
  CHECK(to_smtlib(disj({p, bool_const(true)})) == "true");
  CHECK(to_smtlib(disj({})) == "false");
  CHECK(to_smtlib(conj({conj({p, q}), p})) == "(and p q p)");
  CHECK(to_smtlib(negate(bool_const(false))) == "true");
}

TEST_CASE("sort errors are caught at construction") {
  CHECK_THROWS_AS(le(bool_var("p"), int_const(1)), std::invalid_argument);
  CHECK_THROWS_AS(conj({int_var("x")}), std::invalid_argument);
  CHECK_THROWS_AS(ite(int_var("x"), int_const(1), int_const(2)), std::invalid_argument);
  CHECK_THROWS_AS(eq(bool_var("p"), int_var("x")), std::invalid_argument);
}

TEST_CASE("linearity: products of two variable terms are nonlinear") {
  const Term x = int_var("x");
  const Term y = int_var("y");
  CHECK(is_linear(x * 3 + y));
  CHECK_FALSE(is_linear(x * y));
  CHECK_FALSE(is_linear(le(x * (y + 1), int_const(3))));
  CHECK(is_linear(ite(bool_var("p"), x, int_const(0))));
}

TEST_CASE("evaluation follows integer and boolean semantics") {
  const Model m{{"x", 4}, {"y", -2}, {"p", 1}, {"q", 0}};
  const Term x = int_var("x");
  const Term y = int_var("y");
  const Term p = bool_var("p");
  const Term q = bool_var("q");
  CHECK(evaluate(x * y - 3, m) == -11);
  CHECK(evaluate(x - y, m) == 6);
  CHECK(evaluate(ite(q, x, y), m) == -2);
  CHECK(evaluate(implies(q, p), m) == 1);
  CHECK(evaluate(implies(p, q), m) == 0);
  CHECK(evaluate(disj({q, lt(y, x)}), m) == 1);
  CHECK(evaluate(conj({p, ge(y, x)}), m) == 0);
  CHECK(evaluate(eq(p, negate(q)), m) == 1);
  CHECK_THROWS_AS(evaluate(int_var("z"), m), DecodeError);
}

TEST_CASE("variables are collected once in first-occurrence order") {
  std::vector<std::string> vars;
  collect_variables(le(int_var("b") + int_var("a"), int_var("b")), vars);
  CHECK(vars == std::vector<std::string>{"b", "a"});
}
