#pragma once

#include "mollerlab/geom.hpp"
#include "mollerlab/grid.hpp"
#include "mollerlab/shs.hpp"

namespace mollerlab {

// Frame Clifford generators and spin product.
struct SpinorRealization {
  FiberMatrix gamma0;
  FiberMatrix gamma1;
  FiberMatrix H_spin;

  static SpinorRealization standard();
  [[nodiscard]] const FiberMatrix& gamma(int mu) const { return mu == 0 ? gamma0 : gamma1; }
  // max |gamma_mu gamma_nu + gamma_nu gamma_mu + 2 eta_mu_nu|.
  [[nodiscard]] double clifford_defect() const;
  // max |gamma_mu^dagger H - H gamma_mu|.
  [[nodiscard]] double symmetry_defect() const;
  // Smallest eigenvalue of H gamma(n), n = e_0.
  [[nodiscard]] double positivity_margin() const;
};

// Fiber metric used by the Dirac system for conditions (S)/(H); see README for the sign convention.
FiberMatrix dirac_system_metric();

// A0 = -gamma0/beta, A1 = gamma1/a, B from the frame connection of the diagonal metric.
SHSystem dirac_system(const Metric1p1& metric);

struct KappaSpin {
  MatrixFn kappa;      // before rho scaling
  FiberMap kappa_rho;  // rho * kappa
  double ode_error = 0.0;
};

inline constexpr int kKappaSteps = 64;
inline constexpr double kKappaTol = 1e-10;

// Connection coefficient omega_{lambda 0 1} of the lambda-family frame (zero for diagonal families).
double kappa_connection(const Metric1p1& g0, const Metric1p1& g1, double lam, double t, double x);
// RK4 solution of dK/dlambda = -(1/2) omega gamma^0 gamma^1 K at one point.
FiberMatrix kappa_transport(const Metric1p1& g0, const Metric1p1& g1, double t, double x, int steps = kKappaSteps);
// Lambda-parallel transport of the frame trivialization from g0 to g1, scaled by rho.
KappaSpin kappa_spin(const Metric1p1& g0, const Metric1p1& g1, const RhoWeight& rho, int steps = kKappaSteps);

// psi -> psi^dagger H_spin per node, returned as row components.
SliceData adjunction(const SliceData& psi);
GridField adjunction(const GridField& psi);
// (Upsilon psi)(phi) summed over components at one node.
Complex cospinor_pairing(const SliceData& cospinor, const SliceData& phi, int node);

// int <psi, gamma(n) phi> a dx on level n.
Complex spin_scalar_product(const Metric1p1& metric, const GridField& psi, const GridField& phi, int level);

}  // namespace mollerlab
