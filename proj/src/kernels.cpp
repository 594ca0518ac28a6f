#include "mollerlab/kernels.hpp"

#include "mollerlab/fd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <sstream>

namespace mollerlab {

namespace {

double speed_of(const FiberMatrix& a0inv, const FiberMatrix& a1) {
  const FiberMatrix m = a0inv * a1;
  Eigen::ComplexEigenSolver<FiberMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void store(std::vector<Complex>& dst, std::size_t offset, const FiberMatrix& m) {
  std::copy(m.data(), m.data() + m.size(), dst.begin() + static_cast<std::ptrdiff_t>(offset));
}

struct NodeCoefficients {
  FiberMatrix a0, a0inv, a1, b;
  double speed = 0.0;
};

NodeCoefficients sample_node(const SHSystem& sys, double t, double x) {
  NodeCoefficients c;
  c.a0 = sys.A0(t, x);
  Eigen::FullPivLU<FiberMatrix> lu(c.a0);
  if (!lu.isInvertible()) {
    std::ostringstream os;
    os << "A0 not invertible at (t=" << t << ", x=" << x << ")";
    throw DomainError(os.str());
  }
  c.a0inv = lu.inverse();
  c.a1 = sys.A1(t, x);
  c.b = sys.B(t, x);
  c.speed = speed_of(c.a0inv, c.a1);
  return c;
}

// Per-node right-hand side shared by the serial and parallel loops.
inline void rhs_node(const SystemTable& table, int level, int i, int N, const Complex* y, const Complex* dxy,
                     const Complex* f, Complex* dy) {
  using Vec = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  Eigen::Map<const Vec> yv(y, N), dxv(dxy, N);
  FiberVector r = -(table.A1(level, i) * dxv) - table.B(level, i) * yv;
  if (f != nullptr) r += Eigen::Map<const Vec>(f, N);
  Eigen::Map<Vec>(dy, N) = table.A0inv(level, i) * r;
}

}  // namespace

SystemTable SystemTable::build(const SHSystem& sys, const Grid& grid, bool parallel) {
  SystemTable t;
  t.n_ = sys.N;
  t.nx_ = grid.Nx;
  t.levels_ = 2 * grid.Nt + 1;
  const std::size_t nn = static_cast<std::size_t>(sys.N) * sys.N;
  const std::size_t total = static_cast<std::size_t>(t.levels_) * grid.Nx;
  t.a0_.resize(total * nn);
  t.a0inv_.resize(total * nn);
  t.a1_.resize(total * nn);
  t.b_.resize(total * nn);
  std::vector<double> node_speed(total);
  std::exception_ptr error;
  const long long count = static_cast<long long>(total);
  auto body = [&](long long k) {
    const int level = static_cast<int>(k / grid.Nx);
    const int i = static_cast<int>(k % grid.Nx);
    const NodeCoefficients c = sample_node(sys, grid.half_time(level), grid.x(i));
    const std::size_t off = static_cast<std::size_t>(k) * nn;
    store(t.a0_, off, c.a0);
    store(t.a0inv_, off, c.a0inv);
    store(t.a1_, off, c.a1);
    store(t.b_, off, c.b);
    node_speed[static_cast<std::size_t>(k)] = c.speed;
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < count; ++k) {
      try {
        body(k);
      } catch (...) {
#pragma omp critical(mollerlab_table_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (long long k = 0; k < count; ++k) body(k);
  }
  t.speed_.assign(t.levels_, 0.0);
  for (int level = 0; level < t.levels_; ++level) {
    for (int i = 0; i < grid.Nx; ++i) {
      t.speed_[level] = std::max(t.speed_[level], node_speed[static_cast<std::size_t>(level) * grid.Nx + i]);
    }
  }
  return t;
}

double SystemTable::max_speed() const { return *std::max_element(speed_.begin(), speed_.end()); }

bool SystemTable::operator==(const SystemTable& o) const {
  return n_ == o.n_ && nx_ == o.nx_ && levels_ == o.levels_ && a0_ == o.a0_ && a0inv_ == o.a0inv_ && a1_ == o.a1_ &&
         b_ == o.b_ && speed_ == o.speed_;
}

void rhs_parallel(const SystemTable& table, int level, std::span<const Complex> y, std::span<const Complex> dxy,
                  std::span<const Complex> f, std::span<Complex> dy) {
  const int N = table.N();
  const int Nx = table.Nx();
  const bool has_f = !f.empty();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < Nx; ++i) {
    const std::size_t o = static_cast<std::size_t>(i) * N;
    rhs_node(table, level, i, N, y.data() + o, dxy.data() + o, has_f ? f.data() + o : nullptr, dy.data() + o);
  }
}

void rhs_serial(const SystemTable& table, int level, std::span<const Complex> y, std::span<const Complex> dxy,
                std::span<const Complex> f, std::span<Complex> dy) {
  const int N = table.N();
  const bool has_f = !f.empty();
  for (int i = 0; i < table.Nx(); ++i) {
    const std::size_t o = static_cast<std::size_t>(i) * N;
    rhs_node(table, level, i, N, y.data() + o, dxy.data() + o, has_f ? f.data() + o : nullptr, dy.data() + o);
  }
}

namespace {

// Six-point Lagrange weights for the midpoint between integer levels n and n+1.
struct HalfLevelWeights {
  int start = 0;
  std::vector<double> w;
};

HalfLevelWeights half_level_weights(int n, int Nt) {
  const int npts = std::min(6, Nt + 1);
  HalfLevelWeights h;
  h.start = std::clamp(n - (npts / 2 - 1), 0, Nt + 1 - npts);
  std::vector<double> nodes(npts);
  for (int k = 0; k < npts; ++k) nodes[k] = h.start + k;
  h.w = fd::weights(n + 0.5, nodes, 0);
  return h;
}

}  // namespace

void source_at_half_level(const GridField& f, int level, std::span<Complex> out) {
  if (level % 2 == 0) {
    auto src = f.slice_span(level / 2);
    std::copy(src.begin(), src.end(), out.begin());
    return;
  }
  const auto h = half_level_weights(level / 2, f.grid().Nt);
  std::fill(out.begin(), out.end(), Complex(0.0));
  for (std::size_t k = 0; k < h.w.size(); ++k) {
    auto src = f.slice_span(h.start + static_cast<int>(k));
    for (std::size_t m = 0; m < out.size(); ++m) out[m] += h.w[k] * src[m];
  }
}

GridField evolve(const SystemTable& table, const Grid& grid, const GridField* f, const SliceData& h,
                 Direction direction, const SolveOptions& opts) {
  check_cfl(grid, table.max_speed(), opts.cfl);
  const int N = table.N();
  if (h.N() != N || h.Nx() != grid.Nx) throw ConfigError("Cauchy data shape does not match the system");
  if (f != nullptr && f->N() != N) throw ConfigError("source shape does not match the system");
  GridField out(grid, N);
  const bool forward = direction == Direction::forward;
  const int n0 = forward ? 0 : grid.Nt;
  const int step = forward ? 1 : -1;
  const double dt = step * grid.dt();
  out.set_slice(n0, h);

  // Levels whose source is identically zero are skipped.
  std::vector<char> src_nonzero(2 * grid.Nt + 1, 0);
  if (f != nullptr) {
    std::vector<char> level_nonzero(grid.Nt + 1, 0);
    for (int n = 0; n <= grid.Nt; ++n) level_nonzero[n] = f->is_zero_level(n, 0.0) ? 0 : 1;
    for (int L = 0; L <= 2 * grid.Nt; ++L) {
      if (L % 2 == 0) {
        src_nonzero[L] = level_nonzero[L / 2];
      } else {
        const auto hw = half_level_weights(L / 2, grid.Nt);
        for (std::size_t k = 0; k < hw.w.size(); ++k) src_nonzero[L] |= level_nonzero[hw.start + k];
      }
    }
  }

  const std::size_t size = static_cast<std::size_t>(grid.Nx) * N;
  std::vector<Complex> fbuf(size), dxy(size);
  auto rhs = [&](int level, const SliceData& y, SliceData& dy) {
    std::span<const Complex> fs;
    if (f != nullptr && src_nonzero[level]) {
      source_at_half_level(*f, level, fbuf);
      fs = fbuf;
    }
    d_dx_into(y.values(), dxy, grid.Nx, N, opts.deriv);
    if (opts.parallel) {
      rhs_parallel(table, level, y.values(), dxy, fs, dy.values());
    } else {
      rhs_serial(table, level, y.values(), dxy, fs, dy.values());
    }
  };
  SliceData y = h;
  for (int s = 0; s < grid.Nt; ++s) {
    const int n = n0 + s * step;
    // Stage times sit exactly on half levels.
    SliceRhs stage = [&](double t, const SliceData& yy, SliceData& dy) {
      const int level = static_cast<int>(std::lround(2.0 * (t - grid.t0) / grid.dt()));
      rhs(level, yy, dy);
    };
    y = rk4_step(stage, grid.time(n), y, dt, n + step);
    out.set_slice(n + step, y);
  }
  return out;
}

GridField apply_table(const SystemTable& table, const GridField& psi, DerivMode deriv) {
  const Grid& g = psi.grid();
  const int N = table.N();
  GridField dt_psi = d_dt(psi);
  GridField out(g, N);
  const std::size_t size = static_cast<std::size_t>(g.Nx) * N;
  std::vector<Complex> dxy(size);
  using Vec = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  for (int n = 0; n <= g.Nt; ++n) {
    auto y = psi.slice_span(n);
    d_dx_into(y, dxy, g.Nx, N, deriv);
    auto dt_y = dt_psi.slice_span(n);
    auto dst = out.slice_span(n);
    for (int i = 0; i < g.Nx; ++i) {
      const std::size_t o = static_cast<std::size_t>(i) * N;
      Eigen::Map<const Vec> yv(y.data() + o, N), dx(dxy.data() + o, N), dtv(dt_y.data() + o, N);
      Eigen::Map<Vec>(dst.data() + o, N) =
          table.A0(2 * n, i) * dtv + table.A1(2 * n, i) * dx + table.B(2 * n, i) * yv;
    }
  }
  return out;
}

namespace {

// Right-hand side matrices per node: d_t y = m1 d_x y + m0 y, column-major N x N blocks.
struct LevelRow {
  int N = 0;
  std::vector<Complex> m1, m0;
  double speed = 0.0;
};

LevelRow sample_row(const SHSystem& sys, const Grid& grid, int level, bool parallel) {
  LevelRow row;
  const int N = sys.N;
  const std::size_t block = static_cast<std::size_t>(N) * N;
  row.N = N;
  row.m1.resize(block * grid.Nx);
  row.m0.resize(block * grid.Nx);
  std::vector<double> speed(grid.Nx);
  const double t = grid.half_time(level);
  auto body = [&](int i) {
    const NodeCoefficients c = sample_node(sys, t, grid.x(i));
    const FiberMatrix m1 = -(c.a0inv * c.a1);
    const FiberMatrix m0 = -(c.a0inv * c.b);
    std::copy(m1.data(), m1.data() + block, row.m1.begin() + static_cast<std::ptrdiff_t>(block * i));
    std::copy(m0.data(), m0.data() + block, row.m0.begin() + static_cast<std::ptrdiff_t>(block * i));
    speed[i] = c.speed;
  };
  if (parallel) {
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < grid.Nx; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical(mollerlab_row_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (int i = 0; i < grid.Nx; ++i) body(i);
  }
  row.speed = *std::max_element(speed.begin(), speed.end());
  return row;
}

template <int N>
void apply_row(const LevelRow& row, int Nx, const Complex* y, const Complex* dxy, Complex* dy) {
  using Mat = Eigen::Matrix<Complex, N, N>;
  using Vec = Eigen::Matrix<Complex, N, 1>;
  for (int i = 0; i < Nx; ++i) {
    const std::size_t o = static_cast<std::size_t>(i) * N;
    const std::size_t m = o * N;
    Eigen::Map<Vec>(dy + o) = Eigen::Map<const Mat>(row.m1.data() + m) * Eigen::Map<const Vec>(dxy + o) +
                              Eigen::Map<const Mat>(row.m0.data() + m) * Eigen::Map<const Vec>(y + o);
  }
}

void row_rhs(const LevelRow& row, int N, DerivMode deriv, const SliceData& y, SliceData& dy,
             std::vector<Complex>& dxy) {
  const int Nx = y.Nx();
  d_dx_into(y.values(), dxy, Nx, N, deriv);
  const Complex* yp = y.values().data();
  Complex* out = dy.values().data();
  switch (N) {
    case 1: apply_row<1>(row, Nx, yp, dxy.data(), out); break;
    case 2: apply_row<2>(row, Nx, yp, dxy.data(), out); break;
    case 3: apply_row<3>(row, Nx, yp, dxy.data(), out); break;
    default: throw DomainError("fiber dimension must be 1, 2 or 3");
  }
}

void rk4_row_step(const std::array<const LevelRow*, 3>& rows, int N, DerivMode deriv, SliceData& y, double dt,
                  int time_index) {
  std::vector<Complex> dxy(static_cast<std::size_t>(y.Nx()) * N);
  SliceData k1(y.Nx(), N), k2(y.Nx(), N), k3(y.Nx(), N), k4(y.Nx(), N);
  row_rhs(*rows[0], N, deriv, y, k1, dxy);
  SliceData tmp = y;
  tmp.axpy(0.5 * dt, k1);
  row_rhs(*rows[1], N, deriv, tmp, k2, dxy);
  tmp = y;
  tmp.axpy(0.5 * dt, k2);
  row_rhs(*rows[1], N, deriv, tmp, k3, dxy);
  tmp = y;
  tmp.axpy(dt, k3);
  row_rhs(*rows[2], N, deriv, tmp, k4, dxy);
  y.axpy(dt / 6.0, k1);
  y.axpy(dt / 3.0, k2);
  y.axpy(dt / 3.0, k3);
  y.axpy(dt / 6.0, k4);
  if (!y.all_finite()) {
    throw StabilityError("non-finite values after time step " + std::to_string(time_index) +
                         "; reduce dt (increase Nt)");
  }
}

std::vector<SliceData> evolve_batch_impl(const SHSystem& sys, const Grid& grid, std::vector<SliceData> data,
                                         int n_from, int n_to, const SolveOptions& opts, bool parallel) {
  if (n_from < 0 || n_to < 0 || n_from > grid.Nt || n_to > grid.Nt) throw ConfigError("batch levels out of range");
  if (n_from == n_to) return data;
  const int step = n_to > n_from ? 1 : -1;
  const double dt = step * grid.dt();
  LevelRow r0 = sample_row(sys, grid, 2 * n_from, parallel);
  const long long count = static_cast<long long>(data.size());
  for (int n = n_from; n != n_to; n += step) {
    LevelRow rmid = sample_row(sys, grid, 2 * n + step, parallel);
    LevelRow r1 = sample_row(sys, grid, 2 * n + 2 * step, parallel);
    const double v = std::max({r0.speed, rmid.speed, r1.speed});
    check_cfl(grid, v, opts.cfl);
    const std::array<const LevelRow*, 3> rows = {&r0, &rmid, &r1};
    if (parallel) {
      std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
      for (long long b = 0; b < count; ++b) {
        try {
          rk4_row_step(rows, sys.N, opts.deriv, data[b], dt, n + step);
        } catch (...) {
#pragma omp critical(mollerlab_batch_error)
          if (!error) error = std::current_exception();
        }
      }
      if (error) std::rethrow_exception(error);
    } else {
      for (long long b = 0; b < count; ++b) rk4_row_step(rows, sys.N, opts.deriv, data[b], dt, n + step);
    }
    r0 = std::move(r1);
  }
  return data;
}

}  // namespace

std::vector<SliceData> evolve_batch(const SHSystem& sys, const Grid& grid, std::vector<SliceData> data, int n_from,
                                    int n_to, const SolveOptions& opts) {
  return evolve_batch_impl(sys, grid, std::move(data), n_from, n_to, opts, true);
}

std::vector<SliceData> evolve_batch_serial(const SHSystem& sys, const Grid& grid, std::vector<SliceData> data,
                                           int n_from, int n_to, const SolveOptions& opts) {
  return evolve_batch_impl(sys, grid, std::move(data), n_from, n_to, opts, false);
}

}  // namespace mollerlab
