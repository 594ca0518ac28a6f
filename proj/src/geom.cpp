#include "mollerlab/geom.hpp"

#include "mollerlab/fd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mollerlab {

namespace {

double positive(const ScalarFn& f, double t, double x, const char* what, const std::string& label) {
  const double v = f(t, x);
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " of metric '" << label << "' not strictly positive at (t=" << t << ", x=" << x << "): " << v;
    throw DomainError(os.str());
  }
  return v;
}

}  // namespace

Metric1p1::Metric1p1(ScalarFn beta, ScalarFn a, std::string label)
    : beta_(std::move(beta)), a_(std::move(a)), label_(std::move(label)) {}

double Metric1p1::beta(double t, double x) const { return positive(beta_, t, x, "beta", label_); }
double Metric1p1::a(double t, double x) const { return positive(a_, t, x, "a", label_); }
double Metric1p1::beta_t(double t, double x) const { return fd::d_dt(beta_, t, x); }
double Metric1p1::beta_x(double t, double x) const { return fd::d_dx(beta_, t, x); }
double Metric1p1::a_t(double t, double x) const { return fd::d_dt(a_, t, x); }
double Metric1p1::a_x(double t, double x) const { return fd::d_dx(a_, t, x); }

Metric1p1 Metric1p1::constant(double beta, double a, std::string label) {
  return Metric1p1([beta](double, double) { return beta; }, [a](double, double) { return a; }, std::move(label));
}

Metric1p1 interpolate_metrics(const Metric1p1& g0, const Metric1p1& g1, double lam) {
  if (!(lam >= 0.0 && lam <= 1.0)) {
    throw DomainError("interpolation weight must lie in [0,1], got " + std::to_string(lam));
  }
  if (lam == 0.0) return g0;
  if (lam == 1.0) return g1;
  auto mix = [lam](ScalarFn f0, ScalarFn f1) {
    return [lam, f0 = std::move(f0), f1 = std::move(f1)](double t, double x) {
      const double v0 = f0(t, x);
      const double v1 = f1(t, x);
      return std::sqrt((1.0 - lam) * v0 * v0 + lam * v1 * v1);
    };
  };
  std::ostringstream label;
  label << "interp(" << g0.label() << "," << g1.label() << "," << lam << ")";
  return Metric1p1(mix(g0.beta_fn(), g1.beta_fn()), mix(g0.a_fn(), g1.a_fn()), label.str());
}

ConeReport cone_dominates(const Metric1p1& g0, const Metric1p1& g1, const Grid& grid) {
  ConeReport r;
  r.margin = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= grid.Nt; ++n) {
    const double t = grid.time(n);
    for (int i = 0; i < grid.Nx; ++i) {
      const double x = grid.x(i);
      r.margin = std::min(r.margin, g0.speed(t, x) - g1.speed(t, x));
    }
  }
  r.dominates = r.margin >= 0.0;
  return r;
}

std::vector<double> slice_volume_density(const Metric1p1& g, double t, const Grid& grid) {
  return sample_x(grid, [&](double x) { return g.a(t, x); });
}

RhoWeight::RhoWeight(ScalarFn rho) : rho_(std::move(rho)) {}

RhoWeight RhoWeight::unit() {
  RhoWeight r([](double, double) { return 1.0; });
  r.unit_ = true;
  return r;
}

double RhoWeight::operator()(double t, double x) const {
  const double v = rho_(t, x);
  if (!(v > 0.0)) throw DomainError("rho must be strictly positive");
  return v;
}

double RhoWeight::d_t(double t, double x) const { return unit_ ? 0.0 : fd::d_dt(rho_, t, x); }
double RhoWeight::d_x(double t, double x) const { return unit_ ? 0.0 : fd::d_dx(rho_, t, x); }
double RhoWeight::d_tt(double t, double x) const { return unit_ ? 0.0 : fd::d2_dt2(rho_, t, x); }
double RhoWeight::d_xx(double t, double x) const { return unit_ ? 0.0 : fd::d2_dx2(rho_, t, x); }

RhoWeight rho_from_volumes(const Metric1p1& g0, const Metric1p1& g1) {
  return RhoWeight([g0, g1](double t, double x) { return std::sqrt(g0.a(t, x) / g1.a(t, x)); });
}

ChiProfile::ChiProfile(double t_minus, double t_plus) : t_minus_(t_minus), t_plus_(t_plus) {
  if (!(t_minus < t_plus)) throw DomainError("chi profile needs t_minus < t_plus");
}

namespace {

double smooth_f(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

double ChiProfile::operator()(double t) const {
  const double s = (t - t_minus_) / (t_plus_ - t_minus_);
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double f0 = smooth_f(s);
  const double f1 = smooth_f(1.0 - s);
  return f0 / (f0 + f1);
}

double ChiProfile::derivative(double t) const {
  const double s = (t - t_minus_) / (t_plus_ - t_minus_);
  if (s <= 0.0 || s >= 1.0) return 0.0;
  // d/ds [f(s)/(f(s)+f(1-s))] with f'(s) = f(s)/s^2.
  const double f0 = smooth_f(s);
  const double f1 = smooth_f(1.0 - s);
  const double den = f0 + f1;
  const double ds = (f0 / (s * s) * f1 + f0 * f1 / ((1.0 - s) * (1.0 - s))) / (den * den);
  return ds / (t_plus_ - t_minus_);
}

ChiProfile chi_profile(double t_minus, double t_plus) { return ChiProfile(t_minus, t_plus); }

}  // namespace mollerlab
