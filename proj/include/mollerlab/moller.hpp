#pragma once

#include "mollerlab/geom.hpp"
#include "mollerlab/green.hpp"
#include "mollerlab/grid.hpp"
#include "mollerlab/shs.hpp"
#include "mollerlab/wave.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mollerlab {

struct MollerSystems {
  SHSystem sys0;      // theory 0 on its own bundle
  SHSystem sys01;     // K S0 K^{-1}
  SHSystem sys1;      // theory 1
  SHSystem sys_chi;   // (1-chi) sys01 + chi sys1
  FiberMap K;         // kappa^rho
  std::vector<std::string> warnings;
};

struct MollerStages {
  GridField tilde;       // K psi0
  GridField plus;        // R_+ tilde
  GridField out;         // R_- R_+ tilde
  GridField plus_source; // chi D tilde
};

// R = R_- R_+ K with R_+ = Id - G_chi^+ chi D, R_- = Id - G_1^- (1-chi) D, D = S1 - S01.
class MollerMap {
 public:
  MollerMap(MollerSystems systems, ChiProfile chi, const Grid& grid, SolveOptions opts = {});

  [[nodiscard]] GridField apply(const GridField& psi0) const;
  [[nodiscard]] MollerStages apply_stages(const GridField& psi0) const;
  [[nodiscard]] GridField apply_inverse(const GridField& psi1) const;
  // (S1 - S01) psi.
  [[nodiscard]] GridField difference(const GridField& psi) const;
  // S_chi evolution of slices from the t_minus level to the t_plus level.
  [[nodiscard]] std::vector<SliceData> transport_data(std::vector<SliceData> data) const;

  [[nodiscard]] GridField apply_sys0(const GridField& psi) const;
  [[nodiscard]] GridField apply_sys1(const GridField& psi) const;
  [[nodiscard]] GridField apply_sys_chi(const GridField& psi) const;

  [[nodiscard]] const MollerSystems& systems() const { return *systems_; }
  [[nodiscard]] const ChiProfile& chi() const { return chi_; }
  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const SolveOptions& options() const { return opts_; }
  [[nodiscard]] int level_minus() const { return level_minus_; }
  [[nodiscard]] int level_plus() const { return level_plus_; }

 private:
  std::shared_ptr<const MollerSystems> systems_;
  ChiProfile chi_;
  Grid grid_;
  SolveOptions opts_;
  std::shared_ptr<const SystemTable> table0_;
  GreenOp g1_minus_, gchi_plus_, gchi_minus_, g01_plus_;
  int level_minus_ = 0;
  int level_plus_ = 0;
};

// Throws ConfigError unless chi's transition keeps >= 10% of the window on both sides.
void require_chi_margins(const ChiProfile& chi, const Grid& grid);

// Dirac: sys01 = kappa^rho D0 (kappa^rho)^{-1}.
MollerSystems dirac_moller_systems(const Metric1p1& g0, const Metric1p1& g1, const RhoWeight& rho,
                                   const ChiProfile& chi, const Grid& grid);
// Scalar field: reduced systems of rho P0 rho^{-1}, P1 and their interpolation; K is the jet lift.
MollerSystems wave_moller_systems(const WaveOperator& P0, const WaveOperator& P1, const RhoWeight& rho,
                                  const ChiProfile& chi);
// Dual systems -S^dagger with the dual fiber map (mu0/mu1) H1^{-1} K^{-dagger} H0.
MollerSystems dual_moller_systems(const MollerSystems& s, const ChiProfile& chi, const Grid& grid);

struct MollerReport {
  double intertwining_residual = 0.0;
  double roundtrip_residual = 0.0;
  double conservation_ratio = 0.0;
  double support_leakage = 0.0;
};

// Relative residual ||S1 R psi0 - K S0 psi0|| / ||psi0|| (max norms).
double intertwining_residual(const MollerMap& M, const GridField& psi0, const GridField& r_psi0);
double roundtrip_residual(const MollerMap& M, const GridField& psi0, const GridField& r_psi0);
// Leakage of the R_+ correction outside J^+ of its source.
double plus_support_leakage(const MollerMap& M, const MollerStages& stages);

struct ConservationReport {
  Complex before = 0.0;
  Complex after = 0.0;
  double relative_error = 0.0;
  double ratio = 0.0;  // after / before (real part)
  bool pass = false;
};

inline constexpr double kConservationTol = 1e-5;

ConservationReport conserve_dirac(const MollerMap& M, const Metric1p1& g0, const Metric1p1& g1, const GridField& psi0,
                                  const GridField& phi0);
ConservationReport conserve_wave(const MollerMap& M, const Metric1p1& g0, const Metric1p1& g1, const GridField& u0,
                                 const GridField& v0);

struct DualReport {
  double residual = 0.0;
  bool pass = false;
};

// Builds R* from the dual systems and checks S1*(Upsilon_1 R* phi0) against K* S0*(Upsilon_0 phi0).
DualReport dual_intertwiner_check(const MollerMap& M, const GridField& phi0);

}  // namespace mollerlab
