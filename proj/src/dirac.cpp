#include "mollerlab/dirac.hpp"

#include <algorithm>
#include <cmath>

namespace mollerlab {

namespace {

FiberMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  FiberMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

SpinorRealization SpinorRealization::standard() {
  return SpinorRealization{mat2(1, 0, 0, -1), mat2(0, 1, -1, 0), mat2(1, 0, 0, -1)};
}

double SpinorRealization::clifford_defect() const {
  const double eta[2] = {-1.0, 1.0};
  double d = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    for (int nu = 0; nu < 2; ++nu) {
      FiberMatrix m = gamma(mu) * gamma(nu) + gamma(nu) * gamma(mu);
      if (mu == nu) m += 2.0 * eta[mu] * identity_matrix(2);
      d = std::max(d, m.cwiseAbs().maxCoeff());
    }
  }
  return d;
}

double SpinorRealization::symmetry_defect() const {
  double d = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    d = std::max(d, (gamma(mu).adjoint() * H_spin - H_spin * gamma(mu)).cwiseAbs().maxCoeff());
  }
  return d;
}

double SpinorRealization::positivity_margin() const {
  const FiberMatrix m = H_spin * gamma0;
  Eigen::SelfAdjointEigenSolver<FiberMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

FiberMatrix dirac_system_metric() { return -SpinorRealization::standard().gamma0; }

SHSystem dirac_system(const Metric1p1& metric) {
  const auto sp = SpinorRealization::standard();
  MatrixFn A0 = [g = metric, sp](double t, double x) -> FiberMatrix { return -sp.gamma0 / g.beta(t, x); };
  MatrixFn A1 = [g = metric, sp](double t, double x) -> FiberMatrix { return sp.gamma1 / g.a(t, x); };
  MatrixFn B = [g = metric, sp](double t, double x) -> FiberMatrix {
    const double beta = g.beta(t, x);
    const double a = g.a(t, x);
    const double s = 1.0 / (2.0 * a * beta);
    FiberMatrix b = (-g.a_t(t, x) * s) * sp.gamma0;
    b += (g.beta_x(t, x) * s) * sp.gamma1;
    return b;
  };
  return SHSystem{2, std::move(A0), std::move(A1), std::move(B), constant_matrix(dirac_system_metric()), metric,
                  FiberKind::complex, "dirac(" + metric.label() + ")"};
}

double kappa_connection(const Metric1p1& g0, const Metric1p1& g1, double lam, double t, double x) {
  // omega_{lambda 0 1} = g(nabla_lambda e_0, e_1) = (a/beta) Gamma^x_{lambda t}, and
  // Gamma^x_{lambda t} = (1/2) g^{xx} (d_lambda g_{xt} + d_t g_{x lambda} - d_x g_{lambda t}).
  // The family keeps g_{xt} = g_{x lambda} = g_{lambda t} = 0, so every term vanishes.
  const Metric1p1 g = interpolate_metrics(g0, g1, lam);
  const double g_xt_lam = 0.0;
  const double g_xlam_t = 0.0;
  const double g_lamt_x = 0.0;
  const double a = g.a(t, x);
  const double gamma = 0.5 / (a * a) * (g_xt_lam + g_xlam_t - g_lamt_x);
  return a / g.beta(t, x) * gamma;
}

FiberMatrix kappa_transport(const Metric1p1& g0, const Metric1p1& g1, double t, double x, int steps) {
  const auto sp = SpinorRealization::standard();
  // gamma^0 gamma^1 with raised frame indices gamma^0 = -gamma_0.
  const FiberMatrix gg = -sp.gamma0 * sp.gamma1;
  auto rhs = [&](double lam, const FiberMatrix& k) -> FiberMatrix {
    return (-0.5 * kappa_connection(g0, g1, lam, t, x)) * gg * k;
  };
  FiberMatrix k = identity_matrix(2);
  const double h = 1.0 / steps;
  for (int s = 0; s < steps; ++s) {
    const double lam = s * h;
    const FiberMatrix k1 = rhs(lam, k);
    const FiberMatrix k2 = rhs(lam + 0.5 * h, k + 0.5 * h * k1);
    const FiberMatrix k3 = rhs(lam + 0.5 * h, k + 0.5 * h * k2);
    const FiberMatrix k4 = rhs(lam + h, k + h * k3);
    k += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return k;
}

KappaSpin kappa_spin(const Metric1p1& g0, const Metric1p1& g1, const RhoWeight& rho, int steps) {
  // Probe: halving the step must not move the result, and the identity shortcut is taken only
  // when the transported frame is the identity at every probe point.
  double err = 0.0;
  double off_identity = 0.0;
  for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    for (double x : {0.0, 1.3, 2.6, 3.9, 5.2}) {
      const FiberMatrix k = kappa_transport(g0, g1, t, x, steps);
      err = std::max(err, (k - kappa_transport(g0, g1, t, x, 2 * steps)).norm());
      off_identity = std::max(off_identity, (k - identity_matrix(2)).norm());
    }
  }
  if (err > kKappaTol) throw StabilityError("kappa transport did not reach tolerance");
  MatrixFn kappa = off_identity == 0.0
                       ? constant_matrix(identity_matrix(2))
                       : MatrixFn([g0, g1, steps](double t, double x) -> FiberMatrix {
                           return kappa_transport(g0, g1, t, x, steps);
                         });
  FiberMap scaled = scaled_map(kappa, rho);
  scaled.label = "kappa_spin";
  return KappaSpin{std::move(kappa), std::move(scaled), err};
}

SliceData adjunction(const SliceData& psi) {
  const auto sp = SpinorRealization::standard();
  SliceData out(psi.Nx(), psi.N());
  for (int i = 0; i < psi.Nx(); ++i) {
    for (int c = 0; c < psi.N(); ++c) {
      Complex v = 0.0;
      for (int d = 0; d < psi.N(); ++d) v += std::conj(psi(i, d)) * sp.H_spin(d, c);
      out(i, c) = v;
    }
  }
  return out;
}

GridField adjunction(const GridField& psi) {
  GridField out(psi.grid(), psi.N());
  for (int n = 0; n < psi.levels(); ++n) out.set_slice(n, adjunction(psi.slice(n)));
  return out;
}

Complex cospinor_pairing(const SliceData& cospinor, const SliceData& phi, int node) {
  Complex v = 0.0;
  for (int c = 0; c < phi.N(); ++c) v += cospinor(node, c) * phi(node, c);
  return v;
}

Complex spin_scalar_product(const Metric1p1& metric, const GridField& psi, const GridField& phi, int level) {
  const auto sp = SpinorRealization::standard();
  const FiberMatrix hn = sp.H_spin * sp.gamma0;
  const Grid& g = psi.grid();
  const double t = g.time(level);
  std::vector<Complex> w(g.Nx);
  for (int i = 0; i < g.Nx; ++i) {
    Complex v = 0.0;
    for (int c = 0; c < 2; ++c) {
      for (int d = 0; d < 2; ++d) v += std::conj(psi(level, i, c)) * hn(c, d) * phi(level, i, d);
    }
    w[i] = v;
  }
  const auto density = slice_volume_density(metric, t, g);
  return slice_integral(w, density);
}

}  // namespace mollerlab
