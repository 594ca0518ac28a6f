#include "doctest.h"

#include "mollerlab/fd.hpp"

#include <cmath>
#include <vector>

using namespace mollerlab;

TEST_CASE("Fornberg weights reproduce the three-point stencils") {
  const std::vector<double> nodes = {-1.0, 0.0, 1.0};
  const auto w1 = fd::weights(0.0, nodes, 1);
  CHECK(w1[0] == doctest::Approx(-0.5));
  CHECK(w1[1] == doctest::Approx(0.0));
  CHECK(w1[2] == doctest::Approx(0.5));
  const auto w2 = fd::weights(0.0, nodes, 2);
  CHECK(w2[0] == doctest::Approx(1.0));
  CHECK(w2[1] == doctest::Approx(-2.0));
  CHECK(w2[2] == doctest::Approx(1.0));
}

TEST_CASE("one-sided weights differentiate polynomials exactly") {
  const std::vector<double> nodes = {0.0, 1.0, 2.0, 3.0, 4.0};
  const auto w = fd::weights(0.0, nodes, 1);
  // d/ds s^3 at 0 vanishes, d/ds s at 0 is 1.
  double lin = 0.0, cub = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    lin += w[j] * nodes[j];
    cub += w[j] * std::pow(nodes[j], 3);
  }
  CHECK(lin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(cub) < 1e-10);
}

TEST_CASE("callable derivatives match closed forms") {
  const ScalarFn f = [](double t, double x) { return std::sin(2.0 * t) * std::exp(0.5 * x); };
  const double t = 0.3, x = -0.7;
  CHECK(std::abs(fd::d_dt(f, t, x) - 2.0 * std::cos(2.0 * t) * std::exp(0.5 * x)) < 1e-10);
  CHECK(std::abs(fd::d_dx(f, t, x) - 0.5 * f(t, x)) < 1e-10);
  CHECK(std::abs(fd::d2_dt2(f, t, x) + 4.0 * f(t, x)) < 1e-8);
  CHECK(std::abs(fd::d2_dx2(f, t, x) - 0.25 * f(t, x)) < 1e-8);
  CHECK(std::abs(fd::derivative([](double s) { return std::tanh(s); }, 0.2) - 1.0 / std::pow(std::cosh(0.2), 2)) <
        1e-11);
}
