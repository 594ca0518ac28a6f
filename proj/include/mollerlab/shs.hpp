#pragma once

#include "mollerlab/geom.hpp"
#include "mollerlab/grid.hpp"
#include "mollerlab/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mollerlab {

using MatrixFn = std::function<FiberMatrix(double t, double x)>;

// S = A0 d_t + A1 d_x + B with fiber metric H; metric supplies the cones used by condition (H).
struct SHSystem {
  int N = 0;
  MatrixFn A0;
  MatrixFn A1;
  MatrixFn B;
  MatrixFn H;
  Metric1p1 metric;
  FiberKind kind = FiberKind::complex;
  std::string label;

  [[nodiscard]] FiberMatrix principal_symbol(double xi_t, double xi_x, double t, double x) const;
};

FiberMatrix identity_matrix(int N);
MatrixFn constant_matrix(const FiberMatrix& m);

// Sixth-order derivatives of matrix-valued callables.
FiberMatrix matrix_d_dt(const MatrixFn& m, double t, double x);
FiberMatrix matrix_d_dx(const MatrixFn& m, double t, double x);

// Largest |eigenvalue| of A0^{-1} A1 at a point.
double characteristic_speed(const SHSystem& sys, double t, double x);

struct ConditionReport {
  std::string name;
  double value = 0.0;
  bool pass = false;
  std::vector<std::string> warnings;
};

inline constexpr double kConditionSTol = 1e-10;
inline constexpr int kDefaultAlphaSamples = 17;

ConditionReport check_condition_S(const SHSystem& sys, const Grid& grid);
ConditionReport check_condition_H(const SHSystem& sys, const Grid& grid, int n_alpha = kDefaultAlphaSamples);
// Smallest eigenvalue of the Hermitian part of H (A0 + alpha A1) at one point.
double condition_H_eigenvalue(const SHSystem& sys, double t, double x, double alpha);

// Fiber map field with cached inverse; derivatives are taken numerically.
struct FiberMap {
  MatrixFn value;
  std::string label;

  [[nodiscard]] FiberMatrix operator()(double t, double x) const { return value(t, x); }
  [[nodiscard]] FiberMatrix inverse(double t, double x) const;
  [[nodiscard]] FiberMap inverse_map() const;
  [[nodiscard]] GridField apply(const GridField& f) const;
};

FiberMap identity_map(int N);
// K = rho * kappa.
FiberMap scaled_map(const MatrixFn& kappa, const RhoWeight& rho);

// K S K^{-1}: A' = K A K^{-1}, B' = K (B - A_mu K^{-1} d_mu K) K^{-1}; fiber metric supplied by the caller.
SHSystem conjugate_system(const SHSystem& sys, const FiberMap& K, MatrixFn H_target, std::string label);
// kappa an H-isometry scaled by rho; the ρ factors drop out of the principal part.
SHSystem conjugate_system(const SHSystem& sys, const MatrixFn& kappa, const RhoWeight& rho);

struct InterpolatedSystem {
  SHSystem sys;
  ConeReport cone;
  std::vector<std::string> warnings;
};

// (1-chi) sys01 + chi sys1. Condition (H) is checked against the cones of sys01's metric, the smaller
// covector cone when g1 is cone-dominated by g0. H_override replaces sys1's fiber metric.
InterpolatedSystem interpolate_systems(const SHSystem& sys01, const SHSystem& sys1, const ChiProfile& chi,
                                       const Grid& grid, std::optional<MatrixFn> H_override = std::nullopt);

// Formal adjoint with respect to the fiber metric and vol = beta a dt dx.
SHSystem adjoint_system(const SHSystem& sys);
// Dual system -S^dagger, symmetric hyperbolic with the original time orientation.
SHSystem dual_system(const SHSystem& sys);

struct SolveOptions {
  double cfl = kDefaultCfl;
  DerivMode deriv = DerivMode::spectral;
  bool parallel = true;
};

// Method-of-lines RK4 for d_t Psi = A0^{-1}(f - A1 d_x Psi - B Psi). Forward starts from h at t0,
// backward from h at t1. f may be empty (homogeneous).
GridField solve_cauchy(const SHSystem& sys, const Grid& grid, const GridField* f, const SliceData& h,
                       Direction direction, const SolveOptions& opts = {});

// S applied to a sampled field (spectral x, sixth-order t).
GridField apply_system(const SHSystem& sys, const GridField& psi, const SolveOptions& opts = {});

// |int <Psi, S Phi> vol - int <S^dagger Psi, Phi> vol|; both fields must vanish near the time edges.
double adjoint_defect(const SHSystem& sys, const GridField& psi, const GridField& phi, const SolveOptions& opts = {});

// Pointwise fiber pairing sum over nodes of <Psi, Phi>_H vol, trapezoid in t.
Complex spacetime_pairing(const SHSystem& sys, const GridField& psi, const GridField& phi);

}  // namespace mollerlab
