#pragma once

#include "mollerlab/grid.hpp"
#include "mollerlab/shs.hpp"
#include "mollerlab/types.hpp"

#include <span>
#include <vector>

namespace mollerlab {

// Coefficients sampled at half levels L = 0..2Nt (t = t0 + L dt/2).
class SystemTable {
 public:
  using ConstMap = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>>;

  static SystemTable build(const SHSystem& sys, const Grid& grid, bool parallel = true);
  static SystemTable build_serial(const SHSystem& sys, const Grid& grid) { return build(sys, grid, false); }

  [[nodiscard]] int N() const { return n_; }
  [[nodiscard]] int Nx() const { return nx_; }
  [[nodiscard]] int levels() const { return levels_; }
  [[nodiscard]] ConstMap A0(int level, int i) const { return at(a0_, level, i); }
  [[nodiscard]] ConstMap A0inv(int level, int i) const { return at(a0inv_, level, i); }
  [[nodiscard]] ConstMap A1(int level, int i) const { return at(a1_, level, i); }
  [[nodiscard]] ConstMap B(int level, int i) const { return at(b_, level, i); }
  [[nodiscard]] double level_speed(int level) const { return speed_[level]; }
  [[nodiscard]] double max_speed() const;
  [[nodiscard]] bool operator==(const SystemTable& o) const;

 private:
  [[nodiscard]] ConstMap at(const std::vector<Complex>& v, int level, int i) const {
    const std::size_t nn = static_cast<std::size_t>(n_) * n_;
    return ConstMap(v.data() + (static_cast<std::size_t>(level) * nx_ + i) * nn, n_, n_);
  }
  int n_ = 0;
  int nx_ = 0;
  int levels_ = 0;
  std::vector<Complex> a0_, a0inv_, a1_, b_;
  std::vector<double> speed_;
};

// dy = A0^{-1}(f - A1 d_x y - B y) on one half level; f may be empty.
void rhs_parallel(const SystemTable& table, int level, std::span<const Complex> y, std::span<const Complex> dxy,
                  std::span<const Complex> f, std::span<Complex> dy);
void rhs_serial(const SystemTable& table, int level, std::span<const Complex> y, std::span<const Complex> dxy,
                std::span<const Complex> f, std::span<Complex> dy);

// Full-window RK4 evolution from a table.
GridField evolve(const SystemTable& table, const Grid& grid, const GridField* f, const SliceData& h,
                 Direction direction, const SolveOptions& opts);

// S psi from a table using its integer levels.
GridField apply_table(const SystemTable& table, const GridField& psi, DerivMode deriv);

// Source value at a half level, interpolated from integer levels with six-point Lagrange weights.
void source_at_half_level(const GridField& f, int level, std::span<Complex> out);

// Homogeneous RK4 transport of many slices from integer level n_from to n_to without a stored table;
// coefficients of each stage level are sampled once and shared across the batch.
std::vector<SliceData> evolve_batch(const SHSystem& sys, const Grid& grid, std::vector<SliceData> data, int n_from,
                                    int n_to, const SolveOptions& opts);
std::vector<SliceData> evolve_batch_serial(const SHSystem& sys, const Grid& grid, std::vector<SliceData> data,
                                           int n_from, int n_to, const SolveOptions& opts);

}  // namespace mollerlab
