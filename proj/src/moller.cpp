#include "mollerlab/moller.hpp"

#include "mollerlab/dirac.hpp"
#include "mollerlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mollerlab {

void require_chi_margins(const ChiProfile& chi, const Grid& grid) {
  const double margin = 0.1 * (grid.t1 - grid.t0);
  if (chi.t_minus() - grid.t0 < margin - 1e-12 || grid.t1 - chi.t_plus() < margin - 1e-12) {
    std::ostringstream os;
    os << "chi window [" << chi.t_minus() << ", " << chi.t_plus() << "] must keep 10% of the grid window ["
       << grid.t0 << ", " << grid.t1 << "] on both sides";
    throw ConfigError(os.str());
  }
}

MollerMap::MollerMap(MollerSystems systems, ChiProfile chi, const Grid& grid, SolveOptions opts)
    : systems_(std::make_shared<const MollerSystems>(std::move(systems))),
      chi_(chi),
      grid_(grid),
      opts_(opts),
      table0_(std::make_shared<const SystemTable>(SystemTable::build(systems_->sys0, grid, opts.parallel))),
      g1_minus_(systems_->sys1, GreenSign::retarded, grid, opts),
      gchi_plus_(systems_->sys_chi, GreenSign::advanced, grid, opts),
      gchi_minus_(gchi_plus_, GreenSign::retarded),
      g01_plus_(systems_->sys01, GreenSign::advanced, grid, opts) {
  require_chi_margins(chi_, grid_);
  level_minus_ = static_cast<int>(std::floor((chi_.t_minus() - grid.t0) / grid.dt() + 1e-9));
  level_plus_ = static_cast<int>(std::ceil((chi_.t_plus() - grid.t0) / grid.dt() - 1e-9));
}

GridField MollerMap::apply_sys0(const GridField& psi) const { return apply_table(*table0_, psi, opts_.deriv); }
GridField MollerMap::apply_sys1(const GridField& psi) const {
  return apply_table(g1_minus_.table(), psi, opts_.deriv);
}
GridField MollerMap::apply_sys_chi(const GridField& psi) const {
  return apply_table(gchi_plus_.table(), psi, opts_.deriv);
}

GridField MollerMap::difference(const GridField& psi) const {
  return apply_table(g1_minus_.table(), psi, opts_.deriv) - apply_table(g01_plus_.table(), psi, opts_.deriv);
}

MollerStages MollerMap::apply_stages(const GridField& psi0) const {
  MollerStages s;
  s.tilde = systems_->K.apply(psi0);
  s.plus_source = difference(s.tilde);
  s.plus_source.scale_in_time([this](double t) { return chi_(t); });
  s.plus = s.tilde - gchi_plus_.apply(s.plus_source);
  GridField minus_source = difference(s.plus);
  minus_source.scale_in_time([this](double t) { return 1.0 - chi_(t); });
  s.out = s.plus - g1_minus_.apply(minus_source);
  return s;
}

GridField MollerMap::apply(const GridField& psi0) const { return apply_stages(psi0).out; }

GridField MollerMap::apply_inverse(const GridField& psi1) const {
  GridField src = difference(psi1);
  src.scale_in_time([this](double t) { return 1.0 - chi_(t); });
  const GridField phi = psi1 + gchi_minus_.apply(src);
  GridField src2 = difference(phi);
  src2.scale_in_time([this](double t) { return chi_(t); });
  const GridField tilde = phi + g01_plus_.apply(src2);
  return systems_->K.inverse_map().apply(tilde);
}

std::vector<SliceData> MollerMap::transport_data(std::vector<SliceData> data) const {
  return evolve_batch(systems_->sys_chi, grid_, std::move(data), level_minus_, level_plus_, opts_);
}

MollerSystems dirac_moller_systems(const Metric1p1& g0, const Metric1p1& g1, const RhoWeight& rho,
                                   const ChiProfile& chi, const Grid& grid) {
  const KappaSpin kappa = kappa_spin(g0, g1, rho);
  SHSystem sys0 = dirac_system(g0);
  SHSystem sys01 = conjugate_system(sys0, kappa.kappa, rho);
  SHSystem sys1 = dirac_system(g1);
  InterpolatedSystem chi_sys = interpolate_systems(sys01, sys1, chi, grid);
  return MollerSystems{std::move(sys0), std::move(sys01), std::move(sys1), std::move(chi_sys.sys), kappa.kappa_rho,
                       std::move(chi_sys.warnings)};
}

MollerSystems wave_moller_systems(const WaveOperator& P0, const WaveOperator& P1, const RhoWeight& rho,
                                  const ChiProfile& chi) {
  const SecondOrderOperator p0 = P0.as_second_order();
  const SecondOrderOperator p01 = conjugate_wave(p0, rho);
  const SecondOrderOperator p1 = P1.as_second_order();
  const SecondOrderOperator pchi = interpolate_wave(p01, p1, chi);
  return MollerSystems{reduce_to_shs(p0), reduce_to_shs(p01), reduce_to_shs(p1), reduce_to_shs(pchi), jet_lift(rho),
                       {}};
}

MollerSystems dual_moller_systems(const MollerSystems& s, const ChiProfile& chi, const Grid& grid) {
  SHSystem sys0 = dual_system(s.sys0);
  SHSystem sys1 = dual_system(s.sys1);
  const Metric1p1 g0 = s.sys0.metric;
  const Metric1p1 g1 = s.sys1.metric;
  const MatrixFn H0 = s.sys0.H;
  const MatrixFn H1 = s.sys1.H;
  const FiberMap K = s.K;
  FiberMap K_dual{[=](double t, double x) -> FiberMatrix {
                    const double mu0 = g0.beta(t, x) * g0.a(t, x);
                    const double mu1 = g1.beta(t, x) * g1.a(t, x);
                    return (mu0 / mu1) * H1(t, x).inverse() * K(t, x).inverse().adjoint() * H0(t, x);
                  },
                  "K*"};
  SHSystem sys01 = conjugate_system(sys0, K_dual, H1, sys0.label + "^K*");
  InterpolatedSystem chi_sys = interpolate_systems(sys01, sys1, chi, grid, H1);
  return MollerSystems{std::move(sys0), std::move(sys01), std::move(sys1), std::move(chi_sys.sys), std::move(K_dual),
                       std::move(chi_sys.warnings)};
}

double intertwining_residual(const MollerMap& M, const GridField& psi0, const GridField& r_psi0) {
  const double scale = psi0.max_abs();
  if (scale == 0.0) return r_psi0.max_abs();
  const GridField lhs = M.apply_sys1(r_psi0);
  const GridField rhs = M.systems().K.apply(M.apply_sys0(psi0));
  return max_diff(lhs, rhs) / scale;
}

double roundtrip_residual(const MollerMap& M, const GridField& psi0, const GridField& r_psi0) {
  const double scale = psi0.max_abs();
  const GridField back = M.apply_inverse(r_psi0);
  return scale == 0.0 ? back.max_abs() : max_diff(back, psi0) / scale;
}

double plus_support_leakage(const MollerMap& M, const MollerStages& stages) {
  const GridField correction = stages.tilde - stages.plus;
  const auto mask = support_mask(stages.plus_source, 0.0);
  // Cone speeds of the interpolated system, sampled at integer levels.
  const Grid& g = M.grid();
  std::vector<double> speed(g.Nt + 1, 0.0);
  for (int n = 0; n <= g.Nt; ++n) {
    for (int i = 0; i < g.Nx; ++i) {
      speed[n] = std::max(speed[n], characteristic_speed(M.systems().sys_chi, g.time(n), g.x(i)));
    }
  }
  return check_support(correction, mask, speed, Side::future).leakage;
}

namespace {

ConservationReport finish(Complex before, Complex after) {
  ConservationReport r;
  r.before = before;
  r.after = after;
  const double scale = std::abs(before);
  r.relative_error = scale == 0.0 ? std::abs(after) : std::abs(before - after) / scale;
  r.ratio = scale == 0.0 ? 1.0 : (after / before).real();
  r.pass = r.relative_error < kConservationTol;
  return r;
}

}  // namespace

ConservationReport conserve_dirac(const MollerMap& M, const Metric1p1& g0, const Metric1p1& g1, const GridField& psi0,
                                  const GridField& phi0) {
  const Complex before = spin_scalar_product(g0, psi0, phi0, 0);
  const GridField rpsi = M.apply(psi0);
  const GridField rphi = M.apply(phi0);
  const Complex after = spin_scalar_product(g1, rpsi, rphi, M.grid().Nt);
  return finish(before, after);
}

ConservationReport conserve_wave(const MollerMap& M, const Metric1p1& g0, const Metric1p1& g1, const GridField& u0,
                                 const GridField& v0) {
  const Complex before = symplectic_form(g0, u0, v0, 0);
  const GridField ru = M.apply(u0);
  const GridField rv = M.apply(v0);
  const Complex after = symplectic_form(g1, ru, rv, M.grid().Nt);
  return finish(before, after);
}

DualReport dual_intertwiner_check(const MollerMap& M, const GridField& phi0) {
  const MollerMap dual(dual_moller_systems(M.systems(), M.chi(), M.grid()), M.chi(), M.grid(), M.options());
  const GridField r_phi = dual.apply(phi0);
  DualReport r;
  // Upsilon is multiplication by the fiber metric; both sides are mapped before comparing.
  const GridField lhs = dual.apply_sys1(r_phi);
  const GridField rhs = dual.systems().K.apply(dual.apply_sys0(phi0));
  const FiberMap ups1{M.systems().sys1.H, "Upsilon_1"};
  const double scale = std::max(phi0.max_abs(), 1e-300);
  r.residual = max_diff(ups1.apply(lhs), ups1.apply(rhs)) / scale;
  r.pass = r.residual < 1e-5;
  return r;
}

}  // namespace mollerlab
