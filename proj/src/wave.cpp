#include "mollerlab/wave.hpp"

#include "mollerlab/fd.hpp"

#include <cmath>

namespace mollerlab {

double WaveOperator::b0(double t, double x) const {
  const double beta = metric.beta(t, x);
  const double a = metric.a(t, x);
  // (1/(2 beta^2)) (d_t(a^2)/a^2 - d_t(beta^2)/beta^2)
  return (metric.a_t(t, x) / a - metric.beta_t(t, x) / beta) / (beta * beta);
}

double WaveOperator::bx(double t, double x) const {
  const double beta = metric.beta(t, x);
  const double a = metric.a(t, x);
  return -metric.beta_x(t, x) / (beta * a * a);
}

SecondOrderOperator WaveOperator::as_second_order() const {
  auto coeffs = [op = *this](double t, double x) {
    const double beta = op.metric.beta(t, x);
    const double a = op.metric.a(t, x);
    WaveCoefficients c;
    c.p_tt = 1.0 / (beta * beta);
    c.p_t = op.b0(t, x);
    c.p_xx = 1.0 / (a * a);
    c.p_x = op.bx(t, x) + op.metric.a_x(t, x) / (a * a * a);
    c.p_0 = op.V(t, x);
    return c;
  };
  return SecondOrderOperator{coeffs, metric, "wave(" + metric.label() + ")"};
}

WaveOperator wave_operator(const Metric1p1& metric, double mass) {
  const double m2 = mass * mass;
  return WaveOperator{metric, [m2](double, double) { return m2; }};
}

SecondOrderOperator conjugate_wave(const SecondOrderOperator& P, const RhoWeight& rho) {
  if (rho.is_unit()) return P;
  auto coeffs = [P, rho](double t, double x) {
    const WaveCoefficients c = P.coeffs(t, x);
    const double r = rho(t, x);
    const double rt = rho.d_t(t, x) / r;
    const double rx = rho.d_x(t, x) / r;
    const double rtt = rho.d_tt(t, x) / r;
    const double rxx = rho.d_xx(t, x) / r;
    WaveCoefficients o = c;
    o.p_t = c.p_t - 2.0 * c.p_tt * rt;
    o.p_x = c.p_x + 2.0 * c.p_xx * rx;
    o.p_0 = c.p_0 + c.p_tt * (2.0 * rt * rt - rtt) - c.p_t * rt - c.p_xx * (2.0 * rx * rx - rxx) - c.p_x * rx;
    return o;
  };
  return SecondOrderOperator{coeffs, P.metric, P.label + "^rho"};
}

SecondOrderOperator interpolate_wave(const SecondOrderOperator& P01, const SecondOrderOperator& P1,
                                     const ChiProfile& chi) {
  auto coeffs = [P01, P1, chi](double t, double x) {
    const double c = chi(t);
    if (c == 0.0) return P01.coeffs(t, x);
    if (c == 1.0) return P1.coeffs(t, x);
    const WaveCoefficients a = P01.coeffs(t, x);
    const WaveCoefficients b = P1.coeffs(t, x);
    auto mix = [c](double u, double v) { return (1.0 - c) * u + c * v; };
    return WaveCoefficients{mix(a.p_tt, b.p_tt), mix(a.p_t, b.p_t), mix(a.p_xx, b.p_xx), mix(a.p_x, b.p_x),
                            mix(a.p_0, b.p_0)};
  };
  const Metric1p1& g0 = P01.metric;
  const Metric1p1& g1 = P1.metric;
  auto inv_mix = [chi](ScalarFn f0, ScalarFn f1) {
    return [chi, f0 = std::move(f0), f1 = std::move(f1)](double t, double x) {
      const double c = chi(t);
      const double v0 = f0(t, x);
      const double v1 = f1(t, x);
      return 1.0 / std::sqrt((1.0 - c) / (v0 * v0) + c / (v1 * v1));
    };
  };
  Metric1p1 cone(inv_mix(g0.beta_fn(), g1.beta_fn()), inv_mix(g0.a_fn(), g1.a_fn()),
                 "chi(" + g0.label() + "," + g1.label() + ")");
  return SecondOrderOperator{coeffs, cone, "chi(" + P01.label + "," + P1.label + ")"};
}

GridField component(const GridField& f, int c) {
  const Grid& g = f.grid();
  GridField out(g, 1, f.kind());
  for (int n = 0; n <= g.Nt; ++n) {
    for (int i = 0; i < g.Nx; ++i) out(n, i, 0) = f(n, i, c);
  }
  return out;
}

namespace {

GridField x_derivative(const GridField& u, DerivMode deriv) {
  const Grid& g = u.grid();
  GridField out(g, u.N(), u.kind());
  for (int n = 0; n <= g.Nt; ++n) d_dx_into(u.slice_span(n), out.slice_span(n), g.Nx, u.N(), deriv);
  return out;
}

}  // namespace

GridField apply_wave(const SecondOrderOperator& P, const GridField& u, DerivMode deriv) {
  const Grid& g = u.grid();
  const GridField ut = d_dt(u);
  const GridField utt = d_dt(ut);
  const GridField ux = x_derivative(u, deriv);
  const GridField uxx = x_derivative(ux, deriv);
  GridField out(g, 1, u.kind());
  for (int n = 0; n <= g.Nt; ++n) {
    const double t = g.time(n);
    for (int i = 0; i < g.Nx; ++i) {
      const WaveCoefficients c = P.coeffs(t, g.x(i));
      out(n, i, 0) = c.p_tt * utt(n, i, 0) + c.p_t * ut(n, i, 0) - c.p_xx * uxx(n, i, 0) + c.p_x * ux(n, i, 0) +
                     c.p_0 * u(n, i, 0);
    }
  }
  return out;
}

GridField apply_wave(const WaveOperator& P, const GridField& u, DerivMode deriv) {
  return apply_wave(P.as_second_order(), u, deriv);
}

SHSystem reduce_to_shs(const SecondOrderOperator& P) {
  auto co = P.coeffs;
  MatrixFn A0 = [co](double t, double x) -> FiberMatrix {
    FiberMatrix m = FiberMatrix::Zero(3, 3);
    m(0, 0) = co(t, x).p_tt;
    m(1, 1) = 1.0;
    m(2, 2) = 1.0;
    return m;
  };
  MatrixFn A1 = [co](double t, double x) -> FiberMatrix {
    FiberMatrix m = FiberMatrix::Zero(3, 3);
    m(0, 1) = -co(t, x).p_xx;
    m(1, 0) = -1.0;
    return m;
  };
  MatrixFn B = [co](double t, double x) -> FiberMatrix {
    const WaveCoefficients c = co(t, x);
    FiberMatrix m = FiberMatrix::Zero(3, 3);
    m(0, 0) = c.p_t;
    m(0, 1) = c.p_x;
    m(0, 2) = c.p_0;
    m(2, 0) = -1.0;
    return m;
  };
  MatrixFn H = [co](double t, double x) -> FiberMatrix {
    const WaveCoefficients c = co(t, x);
    FiberMatrix m = FiberMatrix::Zero(3, 3);
    m(0, 0) = 1.0 / c.p_tt;
    m(1, 1) = c.p_xx / c.p_tt;
    m(2, 2) = 1.0;
    return m;
  };
  return SHSystem{3, std::move(A0), std::move(A1), std::move(B), std::move(H), P.metric, FiberKind::real,
                  "reduced(" + P.label + ")"};
}

SHSystem reduce_to_shs(const WaveOperator& P) { return reduce_to_shs(P.as_second_order()); }

GridField jet_of(const GridField& u, DerivMode deriv) {
  const Grid& g = u.grid();
  const GridField ut = d_dt(u);
  const GridField ux = x_derivative(u, deriv);
  GridField out(g, 3, u.kind());
  for (int n = 0; n <= g.Nt; ++n) {
    for (int i = 0; i < g.Nx; ++i) {
      out(n, i, 0) = ut(n, i, 0);
      out(n, i, 1) = ux(n, i, 0);
      out(n, i, 2) = u(n, i, 0);
    }
  }
  return out;
}

double jet_constraint_defect(const GridField& jet) {
  const GridField u = component(jet, 2);
  const GridField ux = x_derivative(u, DerivMode::spectral);
  double d = 0.0;
  const Grid& g = jet.grid();
  for (int n = 0; n <= g.Nt; ++n) {
    for (int i = 0; i < g.Nx; ++i) d = std::max(d, std::abs(jet(n, i, 1) - ux(n, i, 0)));
  }
  return d;
}

WaveSolution solve_wave(const SecondOrderOperator& P, const Grid& grid, const GridField* f, const SliceData& h,
                        const SliceData& h_dot, const SolveOptions& opts) {
  const SHSystem sys = reduce_to_shs(P);
  const SliceData hx = d_dx(h, opts.deriv);
  SliceData data(grid.Nx, 3);
  for (int i = 0; i < grid.Nx; ++i) {
    data(i, 0) = h_dot(i, 0);
    data(i, 1) = hx(i, 0);
    data(i, 2) = h(i, 0);
  }
  GridField source;
  if (f != nullptr) {
    source = GridField(grid, 3);
    for (int n = 0; n <= grid.Nt; ++n) {
      for (int i = 0; i < grid.Nx; ++i) source(n, i, 0) = (*f)(n, i, 0);
    }
  }
  GridField jet = solve_cauchy(sys, grid, f != nullptr ? &source : nullptr, data, Direction::forward, opts);
  GridField u = component(jet, 2);
  return WaveSolution{std::move(jet), std::move(u)};
}

FiberMap jet_lift(const RhoWeight& rho) {
  auto value = [rho](double t, double x) -> FiberMatrix {
    const double r = rho(t, x);
    FiberMatrix m = FiberMatrix::Zero(3, 3);
    m(0, 0) = r;
    m(1, 1) = r;
    m(2, 2) = r;
    m(0, 2) = rho.d_t(t, x);
    m(1, 2) = rho.d_x(t, x);
    return m;
  };
  return FiberMap{value, "jet_lift"};
}

Complex symplectic_form(const Metric1p1& metric, const GridField& u_jet, const GridField& v_jet, int level) {
  const Grid& g = u_jet.grid();
  const double t = g.time(level);
  std::vector<Complex> w(g.Nx);
  std::vector<double> density(g.Nx);
  for (int i = 0; i < g.Nx; ++i) {
    const double x = g.x(i);
    // d_n = beta^{-1} d_t, density a.
    w[i] = v_jet(level, i, 2) * u_jet(level, i, 0) - u_jet(level, i, 2) * v_jet(level, i, 0);
    density[i] = metric.a(t, x) / metric.beta(t, x);
  }
  return slice_integral(w, density);
}

}  // namespace mollerlab
