#include "doctest.h"

#include "mollerlab/dirac.hpp"
#include "mollerlab/green.hpp"
#include "mollerlab/wave.hpp"

#include <cmath>
#include <numbers>

using namespace mollerlab;

namespace {

Metric1p1 bumpy() {
  return Metric1p1([](double t, double x) { return 1.0 + 0.1 * std::sin(x) * std::exp(-t * t); },
                   [](double, double x) { return 1.1 + 0.1 * std::cos(x); }, "bumpy");
}

BumpSpec centre_bump(int component) { return BumpSpec{1.0, std::numbers::pi, 0.5, 1.0, component}; }

}  // namespace

TEST_CASE("Green operators invert the system on both sides") {
  const Grid grid = Grid::make(64, 400, 0.0, 2.0);
  for (const SHSystem& sys : {dirac_system(bumpy()), reduce_to_shs(wave_operator(bumpy(), 1.0))}) {
    const GreenOp adv(sys, GreenSign::advanced, grid);
    const GreenOp ret(adv, GreenSign::retarded);
    const GridField f = bump_source(grid, sys.N, centre_bump(0));
    const double fm = f.max_abs();
    const GridField gp = adv.apply(f);
    const GridField gm = ret.apply(f);
    CHECK(max_diff(apply_system(sys, gp), f) / fm < 1e-5);
    CHECK(max_diff(apply_system(sys, gm), f) / fm < 1e-5);
    const GridField sf = apply_system(sys, f);
    CHECK(max_diff(adv.apply(sf), f) / fm < 1e-5);
    CHECK(max_diff(ret.apply(sf), f) / fm < 1e-5);
    // Exactness: S G f = 0 and G S f = 0.
    CHECK(apply_system(sys, gp - gm).max_abs() / fm < 1e-5);
    CHECK(causal_propagator(adv, ret, sf).max_abs() / fm < 1e-5);
  }
}

TEST_CASE("Green operators respect causal support") {
  // The source must be resolved by the grid; narrower bumps leave spectral tails outside the cone.
  const Grid grid = Grid::make(128, 200, 0.0, 2.0);
  const SHSystem sys = dirac_system(bumpy());
  const GreenOp adv(sys, GreenSign::advanced, grid);
  const GreenOp ret(adv, GreenSign::retarded);
  BumpSpec spec = centre_bump(1);
  spec.rt = 0.2;
  spec.rx = 1.0;
  const GridField f = bump_source(grid, 2, spec);
  const auto mask = support_mask(f);
  const auto speeds = level_speeds(adv.table());
  const GridField gp = adv.apply(f);
  const GridField gm = ret.apply(f);
  CHECK(check_support(gp, mask, speeds, Side::future).leakage < 1e-6);
  CHECK(check_support(gm, mask, speeds, Side::past).leakage < 1e-6);
  // The advanced solution lives in the future: it vanishes before the source.
  for (int n = 0; n < 70; ++n) CHECK(gp.is_zero_level(n, 0.0));
  // Swapping sides puts mass outside the cone.
  CHECK(check_support(gp, mask, speeds, Side::past).leakage > 1e-2);
}

TEST_CASE("sources touching the start side are rejected") {
  const Grid grid = Grid::make(32, 100, 0.0, 1.0);
  const GreenOp adv(dirac_system(bumpy()), GreenSign::advanced, grid);
  GridField f(grid, 2);
  f(0, 3, 0) = 1.0;
  CHECK_THROWS_WITH_AS((void)adv.apply(f), doctest::Contains("support reaches grid boundary"), ConfigError);
  const GreenOp ret(adv, GreenSign::retarded);
  CHECK_NOTHROW((void)ret.apply(f - f));
}

TEST_CASE("duality of advanced and retarded operators") {
  const Grid grid = Grid::make(64, 240, 0.0, 2.0);
  const SHSystem sys = dirac_system(bumpy());
  const SHSystem dual = dual_system(sys);
  const GreenOp dual_adv(dual, GreenSign::advanced, grid);
  const GreenOp ret(sys, GreenSign::retarded, grid);
  const GridField phi = bump_source(grid, 2, BumpSpec{0.8, 2.0, 0.4, 1.0, 0});
  const GridField psi = bump_source(grid, 2, BumpSpec{1.2, 3.0, 0.4, 1.0, 1});
  // The adjoint S^dagger is minus the dual system, so its advanced operator is -G^+_dual.
  const Complex lhs = spacetime_pairing(sys, -1.0 * dual_adv.apply(phi), psi);
  const Complex rhs = spacetime_pairing(sys, phi, ret.apply(psi));
  CHECK(std::abs(lhs) > 1e-6);
  CHECK(std::abs(lhs - rhs) < 1e-6 * std::abs(lhs));
}
