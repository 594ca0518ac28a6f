#include "doctest.h"

#include "mollerlab/expr.hpp"

#include <cmath>
#include <numbers>

using namespace mollerlab;

TEST_CASE("literals and precedence") {
  CHECK(parse_expr("1").eval(0, 0) == 1.0);
  CHECK(parse_expr("1").root().kind == ExprKind::number);
  CHECK(parse_expr("2+3*x").eval(0.0, 2.0) == 8.0);
  CHECK(parse_expr("2^3^2").eval(0, 0) == 512.0);
  CHECK(parse_expr("-2^2").eval(0, 0) == -4.0);
  CHECK(parse_expr("(1-2)-3").eval(0, 0) == -4.0);
  CHECK(parse_expr("1-2-3").eval(0, 0) == -4.0);
  CHECK(parse_expr("8/4/2").eval(0, 0) == 1.0);
  CHECK(parse_expr("2*-x").eval(0, 3.0) == -6.0);
}

TEST_CASE("functions and constants") {
  CHECK(std::abs(parse_expr("sin(pi/2)").eval(0, 0) - 1.0) < 1e-15);
  CHECK(parse_expr("exp(0)+log(1)+sqrt(4)").eval(0, 0) == 3.0);
  CHECK(std::abs(parse_expr("1 + 0.3*tanh(t)").eval(0.5, 0) - (1 + 0.3 * std::tanh(0.5))) < 1e-15);
  CHECK(parse_expr("pi").eval(0, 0) == std::numbers::pi);
  CHECK(parse_expr("1.5e-1").eval(0, 0) == 0.15);
}

TEST_CASE("dependence on t") {
  CHECK_FALSE(parse_expr("1 + sin(x)").depends_on_t());
  CHECK(parse_expr("x*t").depends_on_t());
}

TEST_CASE("print reparses to the same tree") {
  for (const char* s : {"1", "2+3*x", "-x^2", "2^3^2", "sin(pi*x)/(1+t^2)", "exp(-t^2)*0.2*sin(x)", "1-(2-3)",
                        "-(-x)", "1.3*(1 + 0.2*sin(x)*exp(-t^2))"}) {
    const Expr e = parse_expr(s);
    const Expr r = parse_expr(e.print());
    CHECK(e == r);
    CHECK(r.print() == e.print());
  }
}

TEST_CASE("syntax errors carry byte offsets") {
  auto offset_of = [](const char* s) -> long {
    try {
      (void)parse_expr(s);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("1+") == 2);
  CHECK(offset_of("2*(x") == 4);
  CHECK(offset_of("foo(1)") == 0);
  CHECK(offset_of("1 + y") == 4);
  CHECK(offset_of("sin(1,2)") >= 0);
  CHECK(offset_of("sin()") >= 0);
  CHECK(offset_of("1 2") == 2);
  CHECK_THROWS_AS(parse_expr(""), ParseError);
}

TEST_CASE("domain errors name the failing node") {
  CHECK_THROWS_AS((void)parse_expr("log(x)").eval(0, -1.0), DomainError);
  CHECK_THROWS_AS((void)parse_expr("sqrt(x-1)").eval(0, 0.0), DomainError);
  CHECK_THROWS_AS((void)parse_expr("1/x").eval(0, 0.0), DomainError);
  try {
    (void)parse_expr("1 + log(x)").eval(0, -1.0);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("at byte 4") != std::string::npos);
  }
}
