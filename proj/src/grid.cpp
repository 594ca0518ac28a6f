#include "mollerlab/grid.hpp"

#include "mollerlab/fd.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <tuple>

namespace mollerlab {

Grid Grid::make(int Nx, int Nt, double t0, double t1) {
  if (Nx < 8 || !std::has_single_bit(static_cast<unsigned>(Nx))) {
    throw ConfigError("Nx must be a power of two >= 8, got " + std::to_string(Nx));
  }
  if (Nt < 1) throw ConfigError("Nt must be >= 1, got " + std::to_string(Nt));
  if (!(t0 < t1)) throw ConfigError("grid needs t0 < t1");
  return Grid{Nx, Nt, t0, t1};
}

double Grid::dx() const { return 2.0 * std::numbers::pi / Nx; }

void check_cfl(const Grid& grid, double v_max, double cfl) {
  const double limit = cfl * grid.dx() / v_max;
  if (grid.dt() > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violated: dt = " << grid.dt() << " exceeds " << cfl << " * dx / v_max = " << limit
       << " (v_max = " << v_max << "); increase Nt";
    throw ConfigError(os.str());
  }
}

FiberVector SliceData::node(int i) const {
  FiberVector v(n_);
  for (int c = 0; c < n_; ++c) v(c) = (*this)(i, c);
  return v;
}

void SliceData::set_node(int i, const FiberVector& v) {
  for (int c = 0; c < n_; ++c) (*this)(i, c) = v(c);
}

double SliceData::max_abs() const {
  double m = 0.0;
  for (const auto& z : v_) m = std::max(m, std::abs(z));
  return m;
}

bool SliceData::all_finite() const {
  return std::all_of(v_.begin(), v_.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void SliceData::axpy(Complex alpha, const SliceData& other) {
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += alpha * other.v_[k];
}

GridField::GridField(const Grid& grid, int N, FiberKind kind)
    : grid_(grid), n_(N), kind_(kind), v_(static_cast<std::size_t>(grid.Nt + 1) * grid.Nx * N) {}

SliceData GridField::slice(int n) const {
  SliceData s(grid_.Nx, n_);
  auto src = slice_span(n);
  std::copy(src.begin(), src.end(), s.values().begin());
  return s;
}

void GridField::set_slice(int n, const SliceData& s) {
  auto src = s.values();
  std::copy(src.begin(), src.end(), slice_span(n).begin());
}

std::span<Complex> GridField::slice_span(int n) {
  return std::span<Complex>(v_).subspan(index(n, 0, 0), static_cast<std::size_t>(grid_.Nx) * n_);
}

std::span<const Complex> GridField::slice_span(int n) const {
  return std::span<const Complex>(v_).subspan(index(n, 0, 0), static_cast<std::size_t>(grid_.Nx) * n_);
}

double GridField::max_abs() const {
  double m = 0.0;
  for (const auto& z : v_) m = std::max(m, std::abs(z));
  return m;
}

double GridField::l2_norm() const {
  double s = 0.0;
  for (const auto& z : v_) s += std::norm(z);
  return std::sqrt(s * grid_.dx() * grid_.dt());
}

bool GridField::is_zero_level(int n, double tol) const {
  for (const auto& z : slice_span(n)) {
    if (std::abs(z) > tol) return false;
  }
  return true;
}

bool GridField::imaginary_negligible() const {
  const double peak = std::max(max_abs(), 1e-300);
  return std::all_of(v_.begin(), v_.end(), [&](const Complex& z) { return std::abs(z.imag()) <= 1e-14 * peak; });
}

GridField& GridField::operator+=(const GridField& o) {
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

GridField& GridField::operator-=(const GridField& o) {
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

GridField& GridField::operator*=(Complex s) {
  for (auto& z : v_) z *= s;
  if (s.imag() != 0.0) kind_ = FiberKind::complex;
  return *this;
}

void GridField::scale_in_time(const std::function<double(double)>& w) {
  for (int n = 0; n <= grid_.Nt; ++n) {
    const double s = w(grid_.time(n));
    for (auto& z : slice_span(n)) z *= s;
  }
}

double max_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t k = 0; k < va.size(); ++k) m = std::max(m, std::abs(va[k] - vb[k]));
  return m;
}

namespace {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  std::pair<fftw_plan, fftw_plan> get(int Nx, int N) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(Nx, N);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> scratch(static_cast<std::size_t>(Nx) * N);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int n[] = {Nx};
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan fwd = fftw_plan_many_dft(1, n, N, buf, nullptr, N, 1, buf, nullptr, N, 1, FFTW_FORWARD, flags);
    fftw_plan bwd = fftw_plan_many_dft(1, n, N, buf, nullptr, N, 1, buf, nullptr, N, 1, FFTW_BACKWARD, flags);
    plans_[key] = {fwd, bwd};
    return {fwd, bwd};
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    for (auto& [key, p] : plans_) {
      fftw_destroy_plan(p.first);
      fftw_destroy_plan(p.second);
    }
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::pair<fftw_plan, fftw_plan>> plans_;
};

}  // namespace

void d_dx_into(std::span<const Complex> in, std::span<Complex> out, int Nx, int N, DerivMode mode) {
  if (mode == DerivMode::fd4) {
    const double inv = 1.0 / (12.0 * (2.0 * std::numbers::pi / Nx));
    auto at = [&](int i, int c) { return in[static_cast<std::size_t>(((i % Nx) + Nx) % Nx) * N + c]; };
    for (int i = 0; i < Nx; ++i) {
      for (int c = 0; c < N; ++c) {
        out[static_cast<std::size_t>(i) * N + c] =
            (-at(i + 2, c) + 8.0 * at(i + 1, c) - 8.0 * at(i - 1, c) + at(i - 2, c)) * inv;
      }
    }
    return;
  }
  auto [fwd, bwd] = PlanCache::instance().get(Nx, N);
  std::copy(in.begin(), in.end(), out.begin());
  auto* buf = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(fwd, buf, buf);
  const double norm = 1.0 / Nx;
  for (int j = 0; j < Nx; ++j) {
    const int k = j < Nx / 2 ? j : (j == Nx / 2 ? 0 : j - Nx);
    const Complex factor(0.0, k * norm);
    for (int c = 0; c < N; ++c) out[static_cast<std::size_t>(j) * N + c] *= factor;
  }
  fftw_execute_dft(bwd, buf, buf);
}

SliceData d_dx(const SliceData& s, DerivMode mode) {
  SliceData out(s.Nx(), s.N());
  d_dx_into(s.values(), out.values(), s.Nx(), s.N(), mode);
  return out;
}

GridField d_dt(const GridField& f) {
  const Grid& g = f.grid();
  if (g.Nt < 6) throw ConfigError("time derivative needs Nt >= 6");
  GridField out(g, f.N(), f.kind());
  const double inv_dt = 1.0 / g.dt();
  std::array<std::vector<double>, 7> w;
  for (int pos = 0; pos < 7; ++pos) {
    std::array<double, 7> nodes{};
    for (int k = 0; k < 7; ++k) nodes[k] = k;
    w[pos] = fd::weights(pos, nodes, 1);
  }
  for (int n = 0; n <= g.Nt; ++n) {
    int start = n - 3;
    int pos = 3;
    if (n < 3) {
      start = 0;
      pos = n;
    } else if (n > g.Nt - 3) {
      start = g.Nt - 6;
      pos = n - start;
    }
    const auto& wt = w[pos];
    auto dst = out.slice_span(n);
    for (int k = 0; k < 7; ++k) {
      auto src = f.slice_span(start + k);
      const double c = wt[k] * inv_dt;
      for (std::size_t m = 0; m < dst.size(); ++m) dst[m] += c * src[m];
    }
  }
  return out;
}

SliceData rk4_step(const SliceRhs& rhs, double t, const SliceData& y, double dt, int time_index) {
  SliceData k1(y.Nx(), y.N()), k2(y.Nx(), y.N()), k3(y.Nx(), y.N()), k4(y.Nx(), y.N());
  rhs(t, y, k1);
  SliceData tmp = y;
  tmp.axpy(0.5 * dt, k1);
  rhs(t + 0.5 * dt, tmp, k2);
  tmp = y;
  tmp.axpy(0.5 * dt, k2);
  rhs(t + 0.5 * dt, tmp, k3);
  tmp = y;
  tmp.axpy(dt, k3);
  rhs(t + dt, tmp, k4);
  SliceData out = y;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  if (!out.all_finite()) {
    throw StabilityError("non-finite values after time step " + std::to_string(time_index) +
                         "; reduce dt (increase Nt)");
  }
  return out;
}

Complex slice_integral(std::span<const Complex> w, std::span<const double> density) {
  const double dx = 2.0 * std::numbers::pi / static_cast<double>(w.size());
  Complex acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * density[i];
  return acc * dx;
}

double unit_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

GridField bump_source(const Grid& grid, int N, const BumpSpec& spec) {
  if (spec.component < 0 || spec.component >= N) throw ConfigError("bump component out of range");
  const double margin = 2.0 * grid.dt();
  if (spec.tc - spec.rt < grid.t0 + margin || spec.tc + spec.rt > grid.t1 - margin) {
    throw ConfigError("support reaches grid boundary: bump time support must keep 2 steps from the window edges");
  }
  if (spec.rx >= std::numbers::pi) throw ConfigError("bump x radius must be below pi");
  GridField f(grid, N);
  for (int n = 0; n <= grid.Nt; ++n) {
    const double bt = unit_bump((grid.time(n) - spec.tc) / spec.rt);
    if (bt == 0.0) continue;
    for (int i = 0; i < grid.Nx; ++i) {
      double d = std::remainder(grid.x(i) - spec.xc, 2.0 * std::numbers::pi);
      f(n, i, spec.component) = bt * unit_bump(d / spec.rx);
    }
  }
  return f;
}

std::vector<double> sample_x(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> out(grid.Nx);
  for (int i = 0; i < grid.Nx; ++i) out[i] = f(grid.x(i));
  return out;
}

void write_slice_csv(std::ostream& os, const Grid& grid, const SliceData& s) {
  os << "x";
  for (int c = 0; c < s.N(); ++c) os << ",re" << c << ",im" << c;
  os << "\n";
  os.precision(17);
  for (int i = 0; i < s.Nx(); ++i) {
    os << grid.x(i);
    for (int c = 0; c < s.N(); ++c) os << "," << s(i, c).real() << "," << s(i, c).imag();
    os << "\n";
  }
}

}  // namespace mollerlab
