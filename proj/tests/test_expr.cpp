#include <doctest.h>

#include <cmath>
#include <random>

#include "herglotz/error.hpp"
#include "herglotz/expr.hpp"

using namespace herglotz;

namespace {

// Random tree over x, y with domain-safe functions mostly.
Expr random_tree(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> lit(-3.0, 3.0);
  const int k = depth <= 0 ? pick(rng) % 3 : pick(rng);
  switch (k) {
    case 0: return Expr::constant(std::round(lit(rng) * 100.0) / 100.0);
    case 1: return Expr::variable("x");
    case 2: return Expr::variable("y");
    case 3: return Expr::binary(Expr::Kind::add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 4: return Expr::binary(Expr::Kind::subtract, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 5: return Expr::binary(Expr::Kind::multiply, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 6: return Expr::unary(Expr::Kind::negate, random_tree(rng, depth - 1));
    case 7: {
      const Expr::Function fs[] = {Expr::Function::sin, Expr::Function::cos, Expr::Function::tanh,
                                   Expr::Function::exp};
      return Expr::call(fs[pick(rng) % 4], random_tree(rng, depth - 1) * Expr::constant(0.3));
    }
    case 8: return Expr::binary(Expr::Kind::power, random_tree(rng, depth - 1), Expr::constant(pick(rng) % 3 + 1));
    default:
      return Expr::binary(Expr::Kind::divide, random_tree(rng, depth - 1),
                          Expr::constant(2.0) + Expr::call(Expr::Function::cos, random_tree(rng, depth - 1)));
  }
}

}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("precedence and associativity") {
    const VariableBinding none;
    CHECK(evaluate(parse_expression("-2^2"), none) == -4.0);
    CHECK(evaluate(parse_expression("2^3^2"), none) == 512.0);
    CHECK(evaluate(parse_expression("2^-1"), none) == 0.5);
    CHECK(evaluate(parse_expression("1 - 2 - 3"), none) == -4.0);
    CHECK(evaluate(parse_expression("8 / 4 / 2"), none) == 1.0);
    CHECK(evaluate(parse_expression("2 * 3 + 4 * 5"), none) == 26.0);
    CHECK(evaluate(parse_expression("1.5e1 + .5"), none) == 15.5);
  }

  TEST_CASE("functions and variables") {
    VariableBinding b{{"x", 0.7}, {"tau_xd1", -1.5}};
    CHECK(evaluate(parse_expression("sin(x)^2 + cos(x)^2"), b) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(parse_expression("exp(log(x))"), b) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(evaluate(parse_expression("tau_xd1 * 2"), b) == -3.0);
    CHECK(evaluate(parse_expression("sqrt(x*x)"), b) == doctest::Approx(0.7));
  }

  TEST_CASE("syntax errors carry offsets") {
    try {
      parse_expression("1 + * 2");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.offset() == 5);
    }
    CHECK_THROWS_AS(parse_expression("(1 + 2"), SyntaxError);
    CHECK_THROWS_AS(parse_expression("sin x"), SyntaxError);
    CHECK_THROWS_AS(parse_expression(""), SyntaxError);
    CHECK_THROWS_AS(parse_expression("1 2"), SyntaxError);
    try {
      parse_expression("2 * foo(x)");
      FAIL("expected UnknownFunction");
    } catch (const UnknownFunction& e) {
      CHECK(e.name() == "foo");
      CHECK(e.offset() == 5);
    }
  }

  TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(evaluate(parse_expression("x + 1"), {}), UnboundVariable);
    CHECK_THROWS_AS(evaluate(parse_expression("log(x)"), {{"x", -1.0}}), DomainError);
    CHECK_THROWS_AS(evaluate(parse_expression("sqrt(x)"), {{"x", -1.0}}), DomainError);
  }

  TEST_CASE("derivatives of known forms") {
    const VariableBinding b{{"x", 0.3}, {"y", 2.0}};
    auto d = [&](const char* src, const char* var) { return evaluate(differentiate(parse_expression(src), var), b); };
    CHECK(d("x^3", "x") == doctest::Approx(3 * 0.09));
    CHECK(d("sin(x) * y", "x") == doctest::Approx(std::cos(0.3) * 2.0));
    CHECK(d("x / y", "y") == doctest::Approx(-0.3 / 4.0));
    CHECK(d("x^y", "y") == doctest::Approx(std::pow(0.3, 2.0) * std::log(0.3)));
    CHECK(d("tanh(x)", "x") == doctest::Approx(1.0 - std::tanh(0.3) * std::tanh(0.3)));
    CHECK(d("sqrt(y)", "y") == doctest::Approx(0.5 / std::sqrt(2.0)));
    CHECK(differentiate(parse_expression("y^2"), "x").is_constant(0.0));
  }

  TEST_CASE("random trees: derivative matches central differences") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const Expr e = random_tree(rng, 5);
      const Expr dx = differentiate(e, "x");
      VariableBinding b{{"x", u(rng)}, {"y", u(rng)}};
      const double h = 1e-5;
      try {
        VariableBinding bp = b, bm = b;
        bp["x"] += h;
        bm["x"] -= h;
        const double fd = (evaluate(e, bp) - evaluate(e, bm)) / (2 * h);
        const double sym = evaluate(dx, b);
        if (!std::isfinite(fd) || !std::isfinite(sym) || std::abs(sym) > 1e6) continue;
        CHECK(std::abs(sym - fd) <= 1e-5 * std::max(1.0, std::abs(sym)));
        ++checked;
      } catch (const DomainError&) {
      }
    }
    CHECK(checked > 200);
  }

  TEST_CASE("random trees: unparse then parse evaluates to the same bits") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
      const Expr e = random_tree(rng, 5);
      const Expr back = parse_expression(unparse(e));
      CHECK(unparse(back) == unparse(e));
      const VariableBinding b{{"x", u(rng)}, {"y", u(rng)}};
      try {
        const double v = evaluate(e, b);
        const double w = evaluate(back, b);
        if (std::isnan(v)) CHECK(std::isnan(w));
        else CHECK(v == w);
      } catch (const DomainError&) {
      }
    }
  }

  TEST_CASE("differentiation is linear") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const Expr f = random_tree(rng, 4), g = random_tree(rng, 4);
      const double a = 1.7, c = -0.4;
      const Expr lhs = differentiate(Expr::constant(a) * f + Expr::constant(c) * g, "x");
      const VariableBinding b{{"x", u(rng)}, {"y", u(rng)}};
      try {
        const double left = evaluate(lhs, b);
        const double right = a * evaluate(differentiate(f, "x"), b) + c * evaluate(differentiate(g, "x"), b);
        if (!std::isfinite(left) || !std::isfinite(right)) continue;
        CHECK(std::abs(left - right) <= 1e-12 * std::max(1.0, std::abs(right)));
      } catch (const DomainError&) {
      }
    }
  }

  TEST_CASE("compiled programs match the tree evaluator bit for bit") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::vector<std::string> slots{"x", "y"};
    for (int trial = 0; trial < 300; ++trial) {
      const Expr e = random_tree(rng, 6);
      const CompiledExpr c(e, slots);
      const double in[2] = {u(rng), u(rng)};
      try {
        const double v = evaluate(e, {{"x", in[0]}, {"y", in[1]}});
        const double w = c(in);
        if (std::isnan(v)) CHECK(std::isnan(w));
        else CHECK(v == w);
      } catch (const DomainError&) {
        CHECK_THROWS_AS(c(in), DomainError);
      }
    }
    CHECK_THROWS_AS(CompiledExpr(parse_expression("x + q"), slots), UnboundVariable);
  }

  TEST_CASE("simplification and substitution") {
    CHECK(unparse(simplify(parse_expression("0 * x + 1 * y"))) == "y");
    CHECK(simplify(parse_expression("2 + 3 * 4")).is_constant(14.0));
    const Expr e = substitute(parse_expression("x * y + x"), {{"x", parse_expression("t + 1")}});
    CHECK(free_variables(e) == std::set<std::string>{"t", "y"});
    CHECK(evaluate(e, {{"t", 1.0}, {"y", 3.0}}) == 8.0);
    CHECK(depends_on(e, "y"));
    CHECK_FALSE(depends_on(e, "x"));
  }

  TEST_CASE("unparse keeps literals exact") {
    const double v = 0.1 + 0.2;
    const Expr back = parse_expression(unparse(Expr::constant(v)));
    CHECK(evaluate(back, {}) == v);
    CHECK(evaluate(parse_expression(unparse(Expr::constant(-2.5))), {}) == -2.5);
  }
}
