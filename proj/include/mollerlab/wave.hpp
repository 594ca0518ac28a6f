#pragma once

#include "mollerlab/geom.hpp"
#include "mollerlab/grid.hpp"
#include "mollerlab/shs.hpp"

#include <functional>
#include <string>

namespace mollerlab {

// p_tt d_t^2 + p_t d_t - p_xx d_x^2 + p_x d_x + p_0 at a point.
struct WaveCoefficients {
  double p_tt = 1.0;
  double p_t = 0.0;
  double p_xx = 1.0;
  double p_x = 0.0;
  double p_0 = 0.0;
};

// Second-order scalar operator with normally hyperbolic principal part; metric carries its cone.
struct SecondOrderOperator {
  std::function<WaveCoefficients(double t, double x)> coeffs;
  Metric1p1 metric;
  std::string label;
};

// P = -box_g + V; the paper's c is -V.
struct WaveOperator {
  Metric1p1 metric;
  ScalarFn V;

  [[nodiscard]] double b0(double t, double x) const;
  [[nodiscard]] double bx(double t, double x) const;
  [[nodiscard]] SecondOrderOperator as_second_order() const;
};

WaveOperator wave_operator(const Metric1p1& metric, double mass);

// rho P rho^{-1}.
SecondOrderOperator conjugate_wave(const SecondOrderOperator& P, const RhoWeight& rho);
// (1-chi) P01 + chi P1; the cone metric has 1/beta^2 and 1/a^2 interpolated.
SecondOrderOperator interpolate_wave(const SecondOrderOperator& P01, const SecondOrderOperator& P1,
                                     const ChiProfile& chi);

GridField apply_wave(const SecondOrderOperator& P, const GridField& u, DerivMode deriv = DerivMode::spectral);
GridField apply_wave(const WaveOperator& P, const GridField& u, DerivMode deriv = DerivMode::spectral);

// First-order system on (d_t u, d_x u, u) with fiber metric diag(1/p_tt, p_xx/p_tt, 1).
SHSystem reduce_to_shs(const SecondOrderOperator& P);
SHSystem reduce_to_shs(const WaveOperator& P);

// Jet (d_t u, d_x u, u) of a sampled scalar field.
GridField jet_of(const GridField& u, DerivMode deriv = DerivMode::spectral);
GridField component(const GridField& f, int c);
// max |Psi_2 - d_x Psi_3| over all levels.
double jet_constraint_defect(const GridField& jet);

struct WaveSolution {
  GridField jet;
  GridField u;
};

WaveSolution solve_wave(const SecondOrderOperator& P, const Grid& grid, const GridField* f, const SliceData& h,
                        const SliceData& h_dot, const SolveOptions& opts = {});

// Jet lift of rho: maps the jet of u to the jet of rho u.
FiberMap jet_lift(const RhoWeight& rho);

// int (v d_n u - u d_n v) a dx on level n from jets, bilinear.
Complex symplectic_form(const Metric1p1& metric, const GridField& u_jet, const GridField& v_jet, int level);

}  // namespace mollerlab
