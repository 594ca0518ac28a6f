#pragma once

#include "mollerlab/grid.hpp"
#include "mollerlab/types.hpp"

#include <string>
#include <vector>

namespace mollerlab {

// g = -beta^2 dt^2 + a^2 dx^2 on R x S^1.
class Metric1p1 {
 public:
  Metric1p1(ScalarFn beta, ScalarFn a, std::string label);

  // Evaluation checks strict positivity and throws DomainError otherwise.
  [[nodiscard]] double beta(double t, double x) const;
  [[nodiscard]] double a(double t, double x) const;
  [[nodiscard]] double beta_t(double t, double x) const;
  [[nodiscard]] double beta_x(double t, double x) const;
  [[nodiscard]] double a_t(double t, double x) const;
  [[nodiscard]] double a_x(double t, double x) const;
  // Characteristic speed beta/a.
  [[nodiscard]] double speed(double t, double x) const { return beta(t, x) / a(t, x); }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] const ScalarFn& beta_fn() const { return beta_; }
  [[nodiscard]] const ScalarFn& a_fn() const { return a_; }

  static Metric1p1 constant(double beta, double a, std::string label);

 private:
  ScalarFn beta_;
  ScalarFn a_;
  std::string label_;
};

Metric1p1 interpolate_metrics(const Metric1p1& g0, const Metric1p1& g1, double lam);

struct ConeReport {
  bool dominates = true;
  double margin = 0.0;  // min of beta0/a0 - beta1/a1
};

ConeReport cone_dominates(const Metric1p1& g0, const Metric1p1& g1, const Grid& grid);

std::vector<double> slice_volume_density(const Metric1p1& g, double t, const Grid& grid);

// Time-dependent scalar with its first and second derivatives.
class RhoWeight {
 public:
  explicit RhoWeight(ScalarFn rho);
  static RhoWeight unit();

  [[nodiscard]] double operator()(double t, double x) const;
  [[nodiscard]] double d_t(double t, double x) const;
  [[nodiscard]] double d_x(double t, double x) const;
  [[nodiscard]] double d_tt(double t, double x) const;
  [[nodiscard]] double d_xx(double t, double x) const;
  [[nodiscard]] bool is_unit() const { return unit_; }

 private:
  ScalarFn rho_;
  bool unit_ = false;
};

RhoWeight rho_from_volumes(const Metric1p1& g0, const Metric1p1& g1);

class ChiProfile {
 public:
  ChiProfile(double t_minus, double t_plus);

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double derivative(double t) const;
  [[nodiscard]] double t_minus() const { return t_minus_; }
  [[nodiscard]] double t_plus() const { return t_plus_; }

 private:
  double t_minus_;
  double t_plus_;
};

ChiProfile chi_profile(double t_minus, double t_plus);

}  // namespace mollerlab
