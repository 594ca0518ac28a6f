#include "mollerlab/shs.hpp"

#include "mollerlab/fd.hpp"
#include "mollerlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mollerlab {

FiberMatrix SHSystem::principal_symbol(double xi_t, double xi_x, double t, double x) const {
  FiberMatrix s = xi_t * A0(t, x);
  s += xi_x * A1(t, x);
  return s;
}

FiberMatrix identity_matrix(int N) { return FiberMatrix::Identity(N, N); }

MatrixFn constant_matrix(const FiberMatrix& m) {
  return [m](double, double) { return m; };
}

FiberMatrix matrix_d_dt(const MatrixFn& m, double t, double x) {
  return fd::central_d1([&](double s) { return m(s, x); }, t);
}

FiberMatrix matrix_d_dx(const MatrixFn& m, double t, double x) {
  return fd::central_d1([&](double s) { return m(t, s); }, x);
}

double characteristic_speed(const SHSystem& sys, double t, double x) {
  const FiberMatrix a0 = sys.A0(t, x);
  const FiberMatrix m = a0.inverse() * sys.A1(t, x);
  Eigen::ComplexEigenSolver<FiberMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

ConditionReport check_condition_S(const SHSystem& sys, const Grid& grid) {
  ConditionReport r{"S", 0.0, false, {}};
  for (int n = 0; n <= grid.Nt; ++n) {
    const double t = grid.time(n);
    for (int i = 0; i < grid.Nx; ++i) {
      const double x = grid.x(i);
      const FiberMatrix h = sys.H(t, x);
      for (const FiberMatrix& a : {sys.A0(t, x), sys.A1(t, x)}) {
        const FiberMatrix ha = h * a;
        r.value = std::max(r.value, (ha - ha.adjoint()).norm());
      }
    }
  }
  r.pass = r.value < kConditionSTol;
  return r;
}

double condition_H_eigenvalue(const SHSystem& sys, double t, double x, double alpha) {
  const FiberMatrix m = sys.H(t, x) * sys.principal_symbol(1.0, alpha, t, x);
  const FiberMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<FiberMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

ConditionReport check_condition_H(const SHSystem& sys, const Grid& grid, int n_alpha) {
  ConditionReport r{"H", std::numeric_limits<double>::infinity(), false, {}};
  if (n_alpha < 2) n_alpha = 2;
  for (int n = 0; n <= grid.Nt; ++n) {
    const double t = grid.time(n);
    for (int i = 0; i < grid.Nx; ++i) {
      const double x = grid.x(i);
      const double amax = (1.0 - 1e-3) * sys.metric.a(t, x) / sys.metric.beta(t, x);
      for (int k = 0; k < n_alpha; ++k) {
        const double alpha = -amax + 2.0 * amax * k / (n_alpha - 1);
        r.value = std::min(r.value, condition_H_eigenvalue(sys, t, x, alpha));
      }
    }
  }
  r.pass = r.value > 0.0;
  return r;
}

FiberMatrix FiberMap::inverse(double t, double x) const { return value(t, x).inverse(); }

FiberMap FiberMap::inverse_map() const {
  return FiberMap{[v = value](double t, double x) -> FiberMatrix { return v(t, x).inverse(); }, label + "^-1"};
}

GridField FiberMap::apply(const GridField& f) const {
  const Grid& g = f.grid();
  GridField out(g, f.N(), f.kind());
  for (int n = 0; n <= g.Nt; ++n) {
    const double t = g.time(n);
    for (int i = 0; i < g.Nx; ++i) {
      const FiberMatrix k = value(t, g.x(i));
      FiberVector v(f.N());
      for (int c = 0; c < f.N(); ++c) v(c) = f(n, i, c);
      const FiberVector w = k * v;
      for (int c = 0; c < f.N(); ++c) out(n, i, c) = w(c);
    }
  }
  return out;
}

FiberMap identity_map(int N) { return FiberMap{constant_matrix(identity_matrix(N)), "Id"}; }

FiberMap scaled_map(const MatrixFn& kappa, const RhoWeight& rho) {
  return FiberMap{[kappa, rho](double t, double x) -> FiberMatrix { return rho(t, x) * kappa(t, x); }, "rho*kappa"};
}

namespace {

FiberMatrix checked(const FiberMap& K, double t, double x) {
  FiberMatrix k = K(t, x);
  if (std::abs(k.determinant()) < 1e-14) {
    std::ostringstream os;
    os << "fiber map not invertible at (t=" << t << ", x=" << x << ")";
    throw DomainError(os.str());
  }
  return k;
}

}  // namespace

SHSystem conjugate_system(const SHSystem& sys, const FiberMap& K, MatrixFn H_target, std::string label) {
  auto conj = [K](const MatrixFn& a) {
    return [K, a](double t, double x) -> FiberMatrix {
      const FiberMatrix k = checked(K, t, x);
      return k * a(t, x) * k.inverse();
    };
  };
  MatrixFn B = [K, s = sys](double t, double x) -> FiberMatrix {
    const FiberMatrix k = checked(K, t, x);
    const FiberMatrix kinv = k.inverse();
    const FiberMatrix kt = matrix_d_dt(K.value, t, x);
    const FiberMatrix kx = matrix_d_dx(K.value, t, x);
    FiberMatrix b = s.B(t, x);
    b -= s.A0(t, x) * kinv * kt;
    b -= s.A1(t, x) * kinv * kx;
    return k * b * kinv;
  };
  return SHSystem{sys.N, conj(sys.A0), conj(sys.A1), std::move(B), std::move(H_target), sys.metric, sys.kind,
                  std::move(label)};
}

SHSystem conjugate_system(const SHSystem& sys, const MatrixFn& kappa, const RhoWeight& rho) {
  MatrixFn H = [kappa, h = sys.H](double t, double x) -> FiberMatrix {
    const FiberMatrix kinv = kappa(t, x).inverse();
    return kinv.adjoint() * h(t, x) * kinv;
  };
  return conjugate_system(sys, scaled_map(kappa, rho), std::move(H), sys.label + "^rho");
}

InterpolatedSystem interpolate_systems(const SHSystem& sys01, const SHSystem& sys1, const ChiProfile& chi,
                                       const Grid& grid, std::optional<MatrixFn> H_override) {
  if (sys01.N != sys1.N) throw DomainError("interpolated systems need equal fiber dimension");
  auto mix = [chi](const MatrixFn& m0, const MatrixFn& m1) {
    return [chi, m0, m1](double t, double x) -> FiberMatrix {
      const double c = chi(t);
      if (c == 0.0) return m0(t, x);
      if (c == 1.0) return m1(t, x);
      return (1.0 - c) * m0(t, x) + c * m1(t, x);
    };
  };
  InterpolatedSystem out{
      SHSystem{sys1.N, mix(sys01.A0, sys1.A0), mix(sys01.A1, sys1.A1), mix(sys01.B, sys1.B),
               H_override ? *H_override : sys1.H, sys01.metric, sys1.kind, "chi(" + sys01.label + "," + sys1.label + ")"},
      cone_dominates(sys01.metric, sys1.metric, grid),
      {}};
  if (!out.cone.dominates) {
    std::ostringstream os;
    os << "cone domination violated (margin " << out.cone.margin << "); condition (H) may fail";
    out.warnings.push_back(os.str());
  }
  // Re-check (H) on a thinned set of levels; the full check is available through check_condition_H.
  const int stride = std::max(1, grid.Nt / 64);
  Grid coarse = grid;
  coarse.Nt = grid.Nt / stride;
  coarse.t1 = grid.t0 + coarse.Nt * stride * grid.dt();
  const auto h = check_condition_H(out.sys, coarse, 9);
  if (!h.pass) {
    std::ostringstream os;
    os << "condition (H) fails for the interpolated system (min eigenvalue " << h.value << ")";
    out.warnings.push_back(os.str());
  }
  return out;
}

SHSystem adjoint_system(const SHSystem& sys) {
  const SHSystem s = sys;
  auto prin = [s](const MatrixFn& a) {
    return [s, a](double t, double x) -> FiberMatrix {
      const FiberMatrix h = s.H(t, x);
      return -(h.inverse() * a(t, x).adjoint() * h);
    };
  };
  MatrixFn B = [s](double t, double x) -> FiberMatrix {
    const FiberMatrix h = s.H(t, x);
    const Metric1p1& g = s.metric;
    auto mu = [&g](double tt, double xx) { return g.beta(tt, xx) * g.a(tt, xx); };
    MatrixFn w0 = [&](double tt, double xx) -> FiberMatrix {
      return mu(tt, xx) * s.A0(tt, xx).adjoint() * s.H(tt, xx);
    };
    MatrixFn w1 = [&](double tt, double xx) -> FiberMatrix {
      return mu(tt, xx) * s.A1(tt, xx).adjoint() * s.H(tt, xx);
    };
    FiberMatrix div = matrix_d_dt(w0, t, x);
    div += matrix_d_dx(w1, t, x);
    const FiberMatrix inner = s.B(t, x).adjoint() * h - div / mu(t, x);
    return h.inverse() * inner;
  };
  return SHSystem{s.N, prin(s.A0), prin(s.A1), std::move(B), s.H, s.metric, s.kind, s.label + "^dagger"};
}

SHSystem dual_system(const SHSystem& sys) {
  SHSystem adj = adjoint_system(sys);
  auto neg = [](MatrixFn m) {
    return [m = std::move(m)](double t, double x) -> FiberMatrix { return -m(t, x); };
  };
  return SHSystem{adj.N, neg(adj.A0), neg(adj.A1), neg(adj.B), adj.H, adj.metric, adj.kind, sys.label + "^*"};
}

GridField solve_cauchy(const SHSystem& sys, const Grid& grid, const GridField* f, const SliceData& h,
                       Direction direction, const SolveOptions& opts) {
  const SystemTable table = SystemTable::build(sys, grid, opts.parallel);
  return evolve(table, grid, f, h, direction, opts);
}

GridField apply_system(const SHSystem& sys, const GridField& psi, const SolveOptions& opts) {
  const SystemTable table = SystemTable::build(sys, psi.grid(), opts.parallel);
  return apply_table(table, psi, opts.deriv);
}

namespace {

void require_interior(const GridField& f, const char* name) {
  const double tol = 1e-13 * std::max(f.max_abs(), 1e-300);
  const int last = f.grid().Nt;
  for (int n : {0, 1, 2, 3, last - 3, last - 2, last - 1, last}) {
    if (!f.is_zero_level(n, tol)) {
      throw ConfigError(std::string("support reaches grid boundary: ") + name + " must vanish near the time edges");
    }
  }
}

}  // namespace

Complex spacetime_pairing(const SHSystem& sys, const GridField& psi, const GridField& phi) {
  const Grid& g = psi.grid();
  Complex acc = 0.0;
  for (int n = 0; n <= g.Nt; ++n) {
    const double t = g.time(n);
    const double wt = (n == 0 || n == g.Nt) ? 0.5 : 1.0;
    Complex level = 0.0;
    for (int i = 0; i < g.Nx; ++i) {
      const double x = g.x(i);
      FiberVector u(psi.N()), v(phi.N());
      bool any = false;
      for (int c = 0; c < psi.N(); ++c) {
        u(c) = psi(n, i, c);
        v(c) = phi(n, i, c);
        any = any || u(c) != 0.0 || v(c) != 0.0;
      }
      if (!any) continue;
      const Complex p = u.dot(sys.H(t, x) * v);
      level += p * sys.metric.beta(t, x) * sys.metric.a(t, x);
    }
    acc += wt * level;
  }
  return acc * g.dx() * g.dt();
}

double adjoint_defect(const SHSystem& sys, const GridField& psi, const GridField& phi, const SolveOptions& opts) {
  require_interior(psi, "Psi");
  require_interior(phi, "Phi");
  if (psi.max_abs() == 0.0 || phi.max_abs() == 0.0) return 0.0;
  const GridField s_phi = apply_system(sys, phi, opts);
  const GridField sdag_psi = apply_system(adjoint_system(sys), psi, opts);
  return std::abs(spacetime_pairing(sys, psi, s_phi) - spacetime_pairing(sys, sdag_psi, phi));
}

}  // namespace mollerlab
