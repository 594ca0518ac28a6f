#pragma once

#include "mollerlab/types.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace mollerlab {

struct Grid {
  int Nx = 64;
  int Nt = 100;
  double t0 = 0.0;
  double t1 = 1.0;

  // Validates Nx (power of two, >= 8), Nt >= 1 and t0 < t1.
  static Grid make(int Nx, int Nt, double t0, double t1);

  [[nodiscard]] double dx() const;
  [[nodiscard]] double dt() const { return (t1 - t0) / Nt; }
  [[nodiscard]] double time(int n) const { return t0 + n * dt(); }
  // Half-level index L corresponds to t0 + L*dt/2.
  [[nodiscard]] double half_time(int level) const { return t0 + 0.5 * level * dt(); }
  [[nodiscard]] double x(int i) const { return i * dx(); }
};

inline constexpr double kDefaultCfl = 0.4;

// Throws ConfigError unless dt <= cfl * dx / v_max.
void check_cfl(const Grid& grid, double v_max, double cfl = kDefaultCfl);

enum class DerivMode { spectral, fd4 };

// Values at one time level: Nx nodes by N components, component index fastest.
class SliceData {
 public:
  SliceData() = default;
  SliceData(int Nx, int N) : nx_(Nx), n_(N), v_(static_cast<std::size_t>(Nx) * N) {}

  [[nodiscard]] int Nx() const { return nx_; }
  [[nodiscard]] int N() const { return n_; }
  Complex& operator()(int i, int c) { return v_[static_cast<std::size_t>(i) * n_ + c]; }
  const Complex& operator()(int i, int c) const { return v_[static_cast<std::size_t>(i) * n_ + c]; }
  std::span<Complex> values() { return v_; }
  [[nodiscard]] std::span<const Complex> values() const { return v_; }
  [[nodiscard]] FiberVector node(int i) const;
  void set_node(int i, const FiberVector& v);

  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool all_finite() const;
  void axpy(Complex alpha, const SliceData& other);

 private:
  int nx_ = 0;
  int n_ = 0;
  std::vector<Complex> v_;
};

class GridField {
 public:
  GridField() = default;
  GridField(const Grid& grid, int N, FiberKind kind = FiberKind::complex);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] int N() const { return n_; }
  [[nodiscard]] int levels() const { return grid_.Nt + 1; }
  [[nodiscard]] FiberKind kind() const { return kind_; }

  Complex& operator()(int n, int i, int c) { return v_[index(n, i, c)]; }
  const Complex& operator()(int n, int i, int c) const { return v_[index(n, i, c)]; }

  [[nodiscard]] SliceData slice(int n) const;
  void set_slice(int n, const SliceData& s);
  std::span<Complex> slice_span(int n);
  [[nodiscard]] std::span<const Complex> slice_span(int n) const;
  std::span<Complex> values() { return v_; }
  [[nodiscard]] std::span<const Complex> values() const { return v_; }

  [[nodiscard]] double max_abs() const;
  [[nodiscard]] double l2_norm() const;
  [[nodiscard]] bool is_zero_level(int n, double tol) const;
  // Imaginary parts below 1e-14 relative to the peak (only meaningful for real fibers).
  [[nodiscard]] bool imaginary_negligible() const;

  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(Complex s);
  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(Complex s, GridField a) { return a *= s; }

  // Multiplies each level n by w(t_n).
  void scale_in_time(const std::function<double(double)>& w);

 private:
  [[nodiscard]] std::size_t index(int n, int i, int c) const {
    return (static_cast<std::size_t>(n) * grid_.Nx + i) * n_ + c;
  }
  Grid grid_{};
  int n_ = 0;
  FiberKind kind_ = FiberKind::complex;
  std::vector<Complex> v_;
};

// Max-norm of a - b over all entries.
double max_diff(const GridField& a, const GridField& b);

// Periodic x-derivative of every component.
SliceData d_dx(const SliceData& s, DerivMode mode = DerivMode::spectral);
void d_dx_into(std::span<const Complex> in, std::span<Complex> out, int Nx, int N, DerivMode mode);

// Sixth-order time derivative of a field at every level (one-sided at the ends; needs Nt >= 6).
GridField d_dt(const GridField& f);

using SliceRhs = std::function<void(double t, const SliceData& y, SliceData& dy)>;

// One classical RK4 step; throws StabilityError naming time_index if the result is not finite.
SliceData rk4_step(const SliceRhs& rhs, double t, const SliceData& y, double dt, int time_index);

// Periodic rectangle rule sum_i w_i density_i dx.
Complex slice_integral(std::span<const Complex> w, std::span<const double> density);

struct BumpSpec {
  double tc = 0.0;
  double xc = 0.0;
  double rt = 0.5;
  double rx = 0.5;
  int component = 0;
};

// Unit bump exp(-1/(1-s^2)), zero for |s| >= 1.
double unit_bump(double s);

// Product bump in t and periodically wrapped x; needs a >= 2 step margin to both time edges.
GridField bump_source(const Grid& grid, int N, const BumpSpec& spec);

// Values of a scalar callable at the x nodes for time t.
std::vector<double> sample_x(const Grid& grid, const std::function<double(double)>& f);

void write_slice_csv(std::ostream& os, const Grid& grid, const SliceData& s);

}  // namespace mollerlab
