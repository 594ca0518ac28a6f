#pragma once

#include "mollerlab/types.hpp"

#include <span>
#include <type_traits>
#include <vector>

namespace mollerlab::fd {

// Fornberg weights for the m-th derivative at z from the given nodes.
std::vector<double> weights(double z, std::span<const double> nodes, int m);

// Sixth-order central derivatives of a callable, step h.
inline constexpr double kStep = 1e-3;
inline constexpr double kStep2 = 5e-3;
double d_dt(const ScalarFn& f, double t, double x, double h = kStep);
double d_dx(const ScalarFn& f, double t, double x, double h = kStep);
double d2_dt2(const ScalarFn& f, double t, double x, double h = kStep2);
double d2_dx2(const ScalarFn& f, double t, double x, double h = kStep2);

// Central stencils for any callable whose values form a vector space.
template <class F>
auto central_d1(F&& f, double s, double h = kStep) {
  constexpr double w[3] = {45.0 / 60, -9.0 / 60, 1.0 / 60};
  using T = std::decay_t<decltype(f(s))>;
  T acc = (w[0] / h) * (f(s + h) - f(s - h));
  acc += (w[1] / h) * (f(s + 2 * h) - f(s - 2 * h));
  acc += (w[2] / h) * (f(s + 3 * h) - f(s - 3 * h));
  return acc;
}

template <class F>
auto central_d2(F&& f, double s, double h = kStep2) {
  constexpr double w[4] = {-49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
  const double ih2 = 1.0 / (h * h);
  using T = std::decay_t<decltype(f(s))>;
  T acc = (w[0] * ih2) * f(s);
  acc += (w[1] * ih2) * (f(s + h) + f(s - h));
  acc += (w[2] * ih2) * (f(s + 2 * h) + f(s - 2 * h));
  acc += (w[3] * ih2) * (f(s + 3 * h) + f(s - 3 * h));
  return acc;
}

// Same stencil for a 1-d callable.
double derivative(const std::function<double(double)>& f, double s, double h = kStep);
double second_derivative(const std::function<double(double)>& f, double s, double h = kStep2);

}  // namespace mollerlab::fd
