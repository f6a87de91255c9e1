#include <doctest.h>

#include <cmath>

#include "symcov/expr.hpp"

using namespace symcov;

TEST_CASE("parses into the expected shapes") {
  // sin(theta)*p
  const auto e = parse_expression("sin(theta)*p");
  const auto want = ebin(Expr::Kind::Mul, ecall("sin", eident("theta")), eident("p"));
  CHECK(expr_equal(e, want));

  // -theta^2 parses as Neg(Pow(theta, 2)): ^ binds tighter than unary minus
  const auto n = parse_expression("-theta^2");
  const auto wantn = eneg(ebin(Expr::Kind::Pow, eident("theta"), enum_(2)));
  CHECK(expr_equal(n, wantn));

  CHECK(expr_eval(parse_expression("2*pi"), {}) == doctest::Approx(6.2831853).epsilon(1e-7));
}

TEST_CASE("precedence and associativity") {
  CHECK(expr_eval(parse_expression("2^3^2"), {}) == doctest::Approx(512.0));  // right-assoc
  CHECK(expr_eval(parse_expression("6/3/2"), {}) == doctest::Approx(1.0));    // left-assoc
  CHECK(expr_eval(parse_expression("1-2-3"), {}) == doctest::Approx(-4.0));
  CHECK(expr_eval(parse_expression("1+2*3^2"), {}) == doctest::Approx(19.0));
  CHECK(expr_eval(parse_expression("-2^2"), {}) == doctest::Approx(-4.0));
  CHECK(expr_eval(parse_expression("(1+2)*3"), {}) == doctest::Approx(9.0));
  CHECK(expr_eval(parse_expression("2^-1"), {}) == doctest::Approx(0.5));  // '-' via factor
}

TEST_CASE("serialize/reparse round trip") {
  for (const char* src : {"sin(theta)*p", "-theta^2", "1+2*3^2", "exp(-x^2/2)",
                          "cos(a)*cos(b)-sin(a)*sin(b)", "2^3^2", "1-2-3-4"}) {
    const auto e = parse_expression(src);
    const auto r = parse_expression(expr_to_string(e));
    CHECK(expr_equal(e, r));
  }
}

TEST_CASE("errors carry byte offsets") {
  CHECK_THROWS_AS(parse_expression("2+"), ParseError);
  CHECK_THROWS_AS(parse_expression("sin(1"), ParseError);
  CHECK_THROWS_AS(parse_expression("foo(1)"), ParseError);  // unknown function
  CHECK_THROWS_AS(parse_expression("1 2"), ParseError);
  try {
    parse_expression("1 + @");
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
  }
  // unknown identifiers surface at bind time
  CHECK_THROWS_AS(expr_bind(parse_expression("q+1"), {"theta", "p"}), std::invalid_argument);
  CHECK_NOTHROW(expr_bind(parse_expression("theta*p"), {"theta", "p"}));
}

TEST_CASE("evaluation and binding") {
  auto f = expr_bind(parse_expression("sin(theta)*p"), {"theta", "p"});
  CHECK(f({0.5, 2.0}) == doctest::Approx(2.0 * std::sin(0.5)));
  CHECK(expr_eval(parse_expression("pi"), {}) == doctest::Approx(3.14159265358979));
  CHECK_THROWS_AS(expr_eval(parse_expression("zork"), {}), std::invalid_argument);
}

TEST_CASE("symbolic derivatives agree with finite differences") {
  const char* exprs[] = {"sin(theta^2)", "cos(theta)*theta", "exp(-theta^2/2)",
                         "theta^3-2*theta", "1/(1+theta^2)"};
  for (const char* src : exprs) {
    const auto e = parse_expression(src);
    const auto de = expr_derivative(e, "theta");
    for (double x : {-1.3, 0.2, 0.9}) {
      const double h = 1e-6;
      const double fd = (expr_eval(e, {{"theta", x + h}}) - expr_eval(e, {{"theta", x - h}})) /
                        (2 * h);
      CHECK(expr_eval(de, {{"theta", x}}) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(expr_derivative(parse_expression("theta^theta"), "theta"), std::domain_error);
}

TEST_CASE("free identifiers") {
  const auto ids = expr_free_idents(parse_expression("sin(theta)*p + pi"));
  CHECK(ids == std::vector<std::string>{"p", "theta"});
}
