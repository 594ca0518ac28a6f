#include "doctest.h"

#include "mollerlab/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace mollerlab;

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid::make(48, 10, 0, 1), ConfigError);
  CHECK_THROWS_AS(Grid::make(4, 10, 0, 1), ConfigError);
  CHECK_THROWS_AS(Grid::make(64, 0, 0, 1), ConfigError);
  CHECK_THROWS_AS(Grid::make(64, 10, 1, 1), ConfigError);
  const Grid g = Grid::make(64, 10, -1, 1);
  CHECK(g.dt() == doctest::Approx(0.2));
  CHECK(g.half_time(3) == doctest::Approx(-0.7));
  CHECK(g.x(16) == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("CFL check") {
  const Grid g = Grid::make(64, 10, 0, 1);
  CHECK_THROWS_AS(check_cfl(g, 1.0), ConfigError);
  const Grid fine = Grid::make(64, 100, 0, 1);
  CHECK_NOTHROW(check_cfl(fine, 1.0));
}

TEST_CASE("spectral and fd4 x-derivatives") {
  const int Nx = 64;
  SliceData s(Nx, 2);
  const double dx = 2.0 * std::numbers::pi / Nx;
  for (int i = 0; i < Nx; ++i) {
    s(i, 0) = std::sin(3 * i * dx);
    s(i, 1) = Complex(std::cos(i * dx), std::sin(2 * i * dx));
  }
  const SliceData d = d_dx(s);
  const SliceData d4 = d_dx(s, DerivMode::fd4);
  double err = 0.0, err4 = 0.0;
  for (int i = 0; i < Nx; ++i) {
    const double x = i * dx;
    err = std::max(err, std::abs(d(i, 0) - 3.0 * std::cos(3 * x)));
    err = std::max(err, std::abs(d(i, 1) - Complex(-std::sin(x), 2 * std::cos(2 * x))));
    err4 = std::max(err4, std::abs(d4(i, 0) - 3.0 * std::cos(3 * x)));
  }
  CHECK(err < 1e-12);
  CHECK(err4 < 1e-3);
  CHECK(err4 > 1e-8);
}

TEST_CASE("time derivative of a sampled field") {
  const Grid g = Grid::make(8, 40, 0, 1);
  GridField f(g, 1);
  for (int n = 0; n <= g.Nt; ++n) {
    for (int i = 0; i < g.Nx; ++i) f(n, i, 0) = std::sin(2.0 * g.time(n)) * std::cos(g.x(i));
  }
  const GridField ft = d_dt(f);
  double err = 0.0;
  for (int n = 0; n <= g.Nt; ++n) {
    for (int i = 0; i < g.Nx; ++i) {
      err = std::max(err, std::abs(ft(n, i, 0) - 2.0 * std::cos(2.0 * g.time(n)) * std::cos(g.x(i))));
    }
  }
  CHECK(err < 1e-7);
}

TEST_CASE("RK4 is fourth order on a linear ODE") {
  auto solve = [](int steps) {
    SliceData y(8, 1);
    for (int i = 0; i < 8; ++i) y(i, 0) = 1.0;
    const SliceRhs rhs = [](double t, const SliceData& v, SliceData& dv) {
      for (int i = 0; i < v.Nx(); ++i) dv(i, 0) = Complex(0.0, 1.0 + t) * v(i, 0);
    };
    const double dt = 1.0 / steps;
    for (int n = 0; n < steps; ++n) y = rk4_step(rhs, n * dt, y, dt, n);
    return std::abs(y(0, 0) - std::exp(Complex(0.0, 1.5)));
  };
  const double e1 = solve(20), e2 = solve(40);
  CHECK(std::log2(e1 / e2) > 3.8);
}

TEST_CASE("RK4 reports blow-up") {
  SliceData y(8, 1);
  y(0, 0) = 1.0;
  const SliceRhs rhs = [](double, const SliceData& v, SliceData& dv) {
    for (int i = 0; i < v.Nx(); ++i) dv(i, 0) = v(i, 0) * 1e300;
  };
  CHECK_THROWS_AS(rk4_step(rhs, 0.0, y, 1e10, 7), StabilityError);
}

TEST_CASE("bump sources") {
  const Grid g = Grid::make(32, 40, 0, 1);
  BumpSpec spec;
  spec.tc = 0.5;
  spec.rt = 0.2;
  spec.xc = 1.0;
  spec.rx = 0.5;
  const GridField f = bump_source(g, 2, spec);
  CHECK(f.max_abs() > 0.0);
  CHECK(f.is_zero_level(0, 0.0));
  CHECK(f.is_zero_level(g.Nt, 0.0));
  CHECK(unit_bump(1.0) == 0.0);
  CHECK(unit_bump(0.0) == doctest::Approx(std::exp(-1.0)));
  spec.rt = 0.49;
  CHECK_THROWS_AS(bump_source(g, 2, spec), ConfigError);
}

TEST_CASE("field arithmetic and slice integrals") {
  const Grid g = Grid::make(8, 4, 0, 1);
  GridField a(g, 1), b(g, 1);
  a(1, 2, 0) = 3.0;
  b(1, 2, 0) = 1.0;
  CHECK(max_diff(a - b, 2.0 * b) == 0.0);
  std::vector<Complex> w(8, 1.0);
  std::vector<double> dens(8, 2.0);
  CHECK(std::abs(slice_integral(w, dens) - 4.0 * std::numbers::pi) < 1e-13);
  std::ostringstream os;
  write_slice_csv(os, g, a.slice(1));
  CHECK(os.str().find("x,re0,im0") == 0);
}
