#include "doctest.h"

#include "mollerlab/geom.hpp"

#include <cmath>

using namespace mollerlab;

namespace {

Metric1p1 cosmological() {
  return Metric1p1([](double, double) { return 1.0; }, [](double t, double) { return 1.0 + 0.3 * std::tanh(t); },
                   "cosmo");
}

}  // namespace

TEST_CASE("metric evaluation and derivatives") {
  const Metric1p1 g = cosmological();
  CHECK(g.a(0.0, 1.0) == 1.0);
  CHECK(std::abs(g.a_t(0.4, 0.0) - 0.3 / std::pow(std::cosh(0.4), 2)) < 1e-10);
  CHECK(std::abs(g.a_x(0.4, 0.0)) < 1e-12);
  CHECK(g.speed(0.0, 0.0) == 1.0);
  const Metric1p1 bad([](double, double) { return -1.0; }, [](double, double) { return 1.0; }, "bad");
  CHECK_THROWS_AS((void)bad.beta(0, 0), DomainError);
}

TEST_CASE("metric interpolation") {
  const Metric1p1 g0 = Metric1p1::constant(1.0, 1.0, "g0");
  const Metric1p1 g1 = Metric1p1::constant(2.0, 3.0, "g1");
  CHECK(interpolate_metrics(g0, g1, 0.0).a(0, 0) == 1.0);
  CHECK(interpolate_metrics(g0, g1, 1.0).a(0, 0) == 3.0);
  const double mid = interpolate_metrics(g0, g1, 0.5).a(0, 0);
  CHECK(mid == doctest::Approx(std::sqrt(0.5 * 1.0 + 0.5 * 9.0)));
  CHECK_THROWS_AS((void)interpolate_metrics(g0, g1, 1.5), DomainError);
}

TEST_CASE("cone domination") {
  const Grid grid = Grid::make(16, 10, 0.0, 1.0);
  const Metric1p1 slow = Metric1p1::constant(1.0, 2.0, "slow");
  const Metric1p1 fast = Metric1p1::constant(1.0, 1.0, "fast");
  CHECK(cone_dominates(fast, slow, grid).dominates);
  CHECK(cone_dominates(fast, slow, grid).margin == doctest::Approx(0.5));
  CHECK_FALSE(cone_dominates(slow, fast, grid).dominates);
}

TEST_CASE("slice volume density is a") {
  const Grid grid = Grid::make(8, 4, 0.0, 1.0);
  const Metric1p1 g([](double, double) { return 1.0; }, [](double, double x) { return 2.0 + std::sin(x); }, "g");
  const auto d = slice_volume_density(g, 0.5, grid);
  for (int i = 0; i < grid.Nx; ++i) CHECK(d[i] == doctest::Approx(2.0 + std::sin(grid.x(i))));
}

TEST_CASE("rho from volumes") {
  const Metric1p1 g0 = Metric1p1::constant(1.0, 4.0, "g0");
  const Metric1p1 g1 = Metric1p1::constant(1.0, 1.0, "g1");
  const RhoWeight rho = rho_from_volumes(g0, g1);
  CHECK(rho(0.0, 0.0) == doctest::Approx(2.0));
  CHECK(std::abs(rho.d_t(0.0, 0.0)) < 1e-12);
  const RhoWeight one = RhoWeight::unit();
  CHECK(one.is_unit());
  CHECK(one(0.3, 0.2) == 1.0);
  CHECK(one.d_xx(0.3, 0.2) == 0.0);
  const RhoWeight neg([](double, double) { return -1.0; });
  CHECK_THROWS_AS((void)neg(0.0, 0.0), DomainError);
}

TEST_CASE("chi profile") {
  const ChiProfile chi(-1.0, 1.0);
  CHECK(chi(-1.0) == 0.0);
  CHECK(chi(-2.0) == 0.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(3.0) == 1.0);
  CHECK(chi(0.0) == doctest::Approx(0.5));
  double prev = 0.0;
  for (int j = 0; j <= 100; ++j) {
    const double t = -1.0 + 0.02 * j;
    CHECK(chi(t) >= prev);
    prev = chi(t);
  }
  for (double t : {-0.7, -0.1, 0.3, 0.9}) {
    const double h = 1e-5;
    CHECK(std::abs(chi.derivative(t) - (chi(t + h) - chi(t - h)) / (2 * h)) < 1e-7);
  }
  CHECK(chi.derivative(-1.5) == 0.0);
  CHECK_THROWS_AS(ChiProfile(1.0, 1.0), DomainError);
}
