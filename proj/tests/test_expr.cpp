#include <doctest.h>

#include <cmath>
#include <random>

#include "ptspec/expr.hpp"

using namespace ptspec;
using expr::Expr;
using expr::Parity;
using expr::TokenKind;

TEST_SUITE_BEGIN("expr");

TEST_CASE("tokenize basics") {
  const auto toks = expr::tokenize("x1^2");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].kind == TokenKind::Identifier);
  CHECK(toks[0].text == "x1");
  CHECK(toks[1].kind == TokenKind::Caret);
  CHECK(toks[2].kind == TokenKind::Number);
  CHECK(toks[2].value == 2.0);

  const auto t2 = expr::tokenize("1+2*3");
  REQUIRE(t2.size() == 5);
  CHECK(t2[0].kind == TokenKind::Number);
  CHECK(t2[1].kind == TokenKind::Plus);
  CHECK(t2[3].kind == TokenKind::Star);

  // spans cover non-whitespace input without overlap
  const auto t3 = expr::tokenize("  12 + cos(x1) ");
  std::size_t prev_end = 0;
  for (const auto& t : t3) {
    CHECK(t.begin >= prev_end);
    CHECK(t.end > t.begin);
    prev_end = t.end;
  }
}

TEST_CASE("tokenize rejects unknown characters") {
  CHECK_THROWS_AS(expr::tokenize("x1 @ 2"), LexError);
  try {
    expr::tokenize("x1 @ 2");
  } catch (const LexError& e) {
    CHECK(e.position == 3);
    CHECK(e.character == '@');
  }
}

TEST_CASE("parse precedence and associativity") {
  // paper's W form parses and evaluates
  const Expr w = Expr::parse("x1^2*x2/(1+x1^2+x2^2)", 2);
  CHECK(w(1.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // unary minus binds looser than '^'
  const Expr neg = Expr::parse("-x1^2", 1);
  CHECK(neg(2.0) == -4.0);

  // '^' is right-associative and folds to a constant here
  const Expr pow = Expr::parse("2^3^2", 1);
  CHECK(pow(0.0) == 512.0);

  // precedence ladder
  CHECK(Expr::parse("1+2*3", 1)(0.0) == 7.0);
  CHECK(Expr::parse("2*3^2", 1)(0.0) == 18.0);
  CHECK(Expr::parse("6/3/2", 1)(0.0) == 1.0);
  CHECK(Expr::parse("1-2-3", 1)(0.0) == -4.0);
}

TEST_CASE("parse rejections") {
  CHECK_THROWS_AS(Expr::parse("x^x", 1), ParseError);        // non-constant exponent
  CHECK_THROWS_AS(Expr::parse("x^(-1)", 1), ParseError);     // negative exponent
  CHECK_THROWS_AS(Expr::parse("x^0.5", 1), ParseError);      // fractional exponent
  CHECK_THROWS_AS(Expr::parse("(1+2", 1), ParseError);
  CHECK_THROWS_AS(Expr::parse("1+", 1), ParseError);
  CHECK_THROWS_AS(Expr::parse("foo(1)", 1), ParseError);
  CHECK_THROWS_AS(Expr::parse("x2", 1), ParseError);         // out of dimension
  CHECK_THROWS_AS(Expr::parse("x", 2), ParseError);          // 'x' is 1D only
  CHECK_THROWS_AS(Expr::parse("", 1), ParseError);
}

TEST_CASE("evaluate examples and errors") {
  const Expr dw = Expr::parse("x^2*(1+x)^2", 1);
  CHECK(dw(-1.0) == 0.0);
  CHECK(dw(1.0) == 4.0);

  const Expr f = Expr::parse("x/(1+x^2)", 1);
  CHECK(f(1.0) == 0.5);

  CHECK_THROWS_AS(Expr::parse("1/(x-1)", 1)(1.0), EvalError);
  CHECK_THROWS_AS(Expr::parse("sqrt(x)", 1)(-4.0), EvalError);
  CHECK(Expr::parse("sqrt(x)", 1)(4.0) == 2.0);
  CHECK(Expr::parse("exp(x)*cos(x)+tanh(x)-abs(x)", 1)(0.0) == 1.0);
}

TEST_CASE("evaluate is pure") {
  const Expr f = Expr::parse("exp(x1)*sin(x2)/(1+x1^2)", 2);
  const double a = f(0.3141, -1.272);
  const double b = f(0.3141, -1.272);
  CHECK(a == b);  // bit-identical
}

TEST_CASE("detect_parity examples") {
  const Expr w = Expr::parse("x1^2*x2/(1+x1^2+x2^2)", 2);
  const int signs_pm[2] = {+1, -1};
  CHECK(expr::detect_parity(w, {signs_pm, 2}) == Parity::Odd);

  const Expr dw = Expr::parse("x^2*(1+x)^2", 1);
  const int signs_m[1] = {-1};
  CHECK(expr::detect_parity(dw, {signs_m, 1}) == Parity::Neither);

  // zero function: both relations hold; reported even by the tie-break
  const Expr zero = Expr::parse("0*x", 1);
  CHECK(expr::detect_parity(zero, {signs_m, 1}) == Parity::Even);

  const Expr even = Expr::parse("cos(x)*x^2", 1);
  CHECK(expr::detect_parity(even, {signs_m, 1}) == Parity::Even);
}

namespace {

// random expression tree over x1 (and x2 when dim = 2)
std::string random_expr(std::mt19937_64& rng, int depth, int dim) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
  std::uniform_real_distribution<double> cst(0.0, 4.0);
  switch (pick(rng)) {
    case 0: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", cst(rng));
      return buf;
    }
    case 1:
      return dim == 2 && (rng() & 1) ? "x2" : "x1";
    case 2:
      return "(" + random_expr(rng, depth - 1, dim) + "+" + random_expr(rng, depth - 1, dim) + ")";
    case 3:
      return "(" + random_expr(rng, depth - 1, dim) + "*" + random_expr(rng, depth - 1, dim) + ")";
    case 4:
      return "(-" + random_expr(rng, depth - 1, dim) + ")";
    case 5:
      return "(" + random_expr(rng, depth - 1, dim) + "^" + std::to_string(rng() % 4) + ")";
    default: {
      const char* fn[] = {"exp", "tanh", "sin", "cos", "abs"};
      return std::string(fn[rng() % 5]) + "(" + random_expr(rng, depth - 1, dim) + ")";
    }
  }
}

}  // namespace

TEST_CASE("pretty-print round-trips structurally") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 2);
    const std::string src = random_expr(rng, 4, dim);
    const Expr e = Expr::parse(src, dim);
    const Expr round = Expr::parse(e.str(), dim);
    CHECK(structurally_equal(e, round));
  }
}

TEST_CASE("parity of f(x) - f(sigma x) for random polynomials") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    // random polynomial of degree <= 6 in x1
    std::string f = "0";
    for (int d = 0; d <= 6; ++d) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.4f*x1^%d", coef(rng), d);
      f += std::string("+(") + buf + ")";
    }
    std::string reflected = f;
    for (std::size_t at = reflected.find("x1"); at != std::string::npos;
         at = reflected.find("x1", at + 7))
      reflected.replace(at, 2, "(0-x1)");
    const std::string g = "(" + f + ")-(" + reflected + ")";
    const Expr ge = Expr::parse(g, 1);
    const int signs[1] = {-1};
    const Parity p = expr::detect_parity(ge, {signs, 1});
    // g(sigma x) = -g(x) by construction: odd, or even exactly when g == 0
    if (p == Parity::Even) {
      std::mt19937_64 check(11);
      std::uniform_real_distribution<double> pt(-2.0, 2.0);
      for (int s = 0; s < 16; ++s) {
        const double x = pt(check);
        CHECK(std::fabs(ge(x)) <= 1e-9);
      }
    } else {
      CHECK(p == Parity::Odd);
    }
  }
}

TEST_SUITE_END();
