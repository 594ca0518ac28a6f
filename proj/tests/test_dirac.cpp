#include "doctest.h"

#include "mollerlab/dirac.hpp"

#include <cmath>

using namespace mollerlab;

namespace {

Metric1p1 cosmological() {
  return Metric1p1([](double, double) { return 1.0; }, [](double t, double) { return 1.0 + 0.3 * std::tanh(t); },
                   "cosmo");
}

Metric1p1 modulated() {
  return Metric1p1([](double, double) { return 1.0; },
                   [](double t, double x) { return 1.3 * (1.0 + 0.2 * std::sin(x) * std::exp(-t * t)); }, "mod");
}

}  // namespace

TEST_CASE("standard spinor realization") {
  const auto sp = SpinorRealization::standard();
  CHECK(sp.clifford_defect() < 1e-15);
  CHECK(sp.symmetry_defect() < 1e-15);
  CHECK(sp.positivity_margin() > 0.0);
  CHECK((sp.gamma0 * sp.gamma0 - FiberMatrix::Identity(2, 2)).norm() < 1e-15);
  CHECK((sp.gamma1 * sp.gamma1 + FiberMatrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("kappa for the diagonal family is rho times the identity") {
  const Metric1p1 g0 = Metric1p1::constant(1.0, 1.0, "flat");
  const Metric1p1 g1 = modulated();
  CHECK(kappa_connection(g0, g1, 0.3, 0.2, 1.0) == 0.0);
  const KappaSpin k = kappa_spin(g0, g1, rho_from_volumes(g0, g1));
  CHECK(k.ode_error < kKappaTol);
  const auto sp = SpinorRealization::standard();
  for (double t : {-1.0, 0.0, 0.7}) {
    for (double x : {0.1, 2.0, 4.5}) {
      const FiberMatrix kap = k.kappa(t, x);
      CHECK((kap - FiberMatrix::Identity(2, 2)).norm() < 1e-10);
      // Clifford intertwining in the frame trivialization and spin-product isometry.
      for (int mu = 0; mu < 2; ++mu) CHECK((kap * sp.gamma(mu) * kap.inverse() - sp.gamma(mu)).norm() < 1e-10);
      CHECK((kap.adjoint() * sp.H_spin * kap - sp.H_spin).norm() < 1e-10);
      const double rho = std::sqrt(1.0 / g1.a(t, x));
      CHECK((k.kappa_rho(t, x) - rho * FiberMatrix::Identity(2, 2)).norm() < 1e-12);
    }
  }
  CHECK((kappa_transport(g0, g1, 0.0, 1.0) - FiberMatrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("Dirac system metric convention") {
  const auto sp = SpinorRealization::standard();
  CHECK((dirac_system_metric() + sp.gamma0).norm() == 0.0);
}

TEST_CASE("adjunction pairs spinors with the spin product") {
  SliceData psi(4, 2), phi(4, 2);
  psi(1, 0) = Complex(1.0, 2.0);
  psi(1, 1) = Complex(0.5, -1.0);
  phi(1, 0) = Complex(-0.3, 0.1);
  phi(1, 1) = Complex(2.0, 0.0);
  const auto sp = SpinorRealization::standard();
  const Complex expect = (psi.node(1).adjoint() * sp.H_spin * phi.node(1))(0, 0);
  CHECK(std::abs(cospinor_pairing(adjunction(psi), phi, 1) - expect) < 1e-15);
}

TEST_CASE("spin scalar product does not depend on the slice") {
  for (const Metric1p1& g : {cosmological(), modulated()}) {
    const Grid grid = Grid::make(64, 400, -2.0, 2.0);
    const SHSystem sys = dirac_system(g);
    SliceData h(grid.Nx, 2), k(grid.Nx, 2);
    for (int i = 0; i < grid.Nx; ++i) {
      const double x = grid.x(i);
      h(i, 0) = std::cos(x);
      h(i, 1) = Complex(0.0, std::sin(2 * x));
      k(i, 0) = Complex(std::cos(x), 0.3);
      k(i, 1) = Complex(0.5, std::sin(2 * x));
    }
    const GridField psi = solve_cauchy(sys, grid, nullptr, h, Direction::forward);
    const GridField phi = solve_cauchy(sys, grid, nullptr, k, Direction::forward);
    const Complex q0 = spin_scalar_product(g, psi, phi, 0);
    const Complex n0 = spin_scalar_product(g, psi, psi, 0);
    CHECK(std::abs(n0.imag()) < 1e-14);
    CHECK(n0.real() > 0.0);
    CHECK(std::abs(q0) > 1e-1);
    double drift = 0.0;
    for (int n = 0; n <= grid.Nt; ++n) drift = std::max(drift, std::abs(spin_scalar_product(g, psi, phi, n) - q0));
    CHECK(drift < 1e-6 * std::abs(q0));
  }
}
