#include "mollerlab/fd.hpp"

#include <algorithm>

namespace mollerlab::fd {

std::vector<double> weights(double z, std::span<const double> nodes, int m) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

double derivative(const std::function<double(double)>& f, double s, double h) { return central_d1(f, s, h); }

double second_derivative(const std::function<double(double)>& f, double s, double h) {
  return central_d2(f, s, h);
}

double d_dt(const ScalarFn& f, double t, double x, double h) {
  return derivative([&](double s) { return f(s, x); }, t, h);
}

double d_dx(const ScalarFn& f, double t, double x, double h) {
  return derivative([&](double s) { return f(t, s); }, x, h);
}

double d2_dt2(const ScalarFn& f, double t, double x, double h) {
  return second_derivative([&](double s) { return f(s, x); }, t, h);
}

double d2_dx2(const ScalarFn& f, double t, double x, double h) {
  return second_derivative([&](double s) { return f(t, s); }, x, h);
}

}  // namespace mollerlab::fd
