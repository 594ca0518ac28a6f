#include "mollerlab/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mollerlab {

GreenOp::GreenOp(SHSystem sys, GreenSign sign, const Grid& grid, SolveOptions opts)
    : sys_(std::move(sys)),
      sign_(sign),
      grid_(grid),
      opts_(opts),
      table_(std::make_shared<const SystemTable>(SystemTable::build(sys_, grid_, opts_.parallel))) {
  check_cfl(grid_, table_->max_speed(), opts_.cfl);
}

GreenOp::GreenOp(const GreenOp& other, GreenSign sign)
    : sys_(other.sys_), sign_(sign), grid_(other.grid_), opts_(other.opts_), table_(other.table_) {}

void require_margin(const GridField& f, GreenSign sign) {
  const double tol = 1e-13 * std::max(f.max_abs(), std::numeric_limits<double>::min());
  const int Nt = f.grid().Nt;
  const int a = sign == GreenSign::advanced ? 0 : Nt;
  const int b = sign == GreenSign::advanced ? 1 : Nt - 1;
  if (!f.is_zero_level(a, tol) || !f.is_zero_level(b, tol)) {
    throw ConfigError(sign == GreenSign::advanced
                          ? "support reaches grid boundary: source must vanish on the first two time levels"
                          : "support reaches grid boundary: source must vanish on the last two time levels");
  }
}

GridField GreenOp::apply(const GridField& f) const {
  require_margin(f, sign_);
  const SliceData zero(grid_.Nx, sys_.N);
  return evolve(*table_, grid_, &f, zero, sign_ == GreenSign::advanced ? Direction::forward : Direction::backward,
                opts_);
}

GridField causal_propagator(const GreenOp& advanced, const GreenOp& retarded, const GridField& f) {
  return advanced.apply(f) - retarded.apply(f);
}

GridField causal_propagator(const SHSystem& sys, const Grid& grid, const GridField& f, const SolveOptions& opts) {
  const GreenOp adv(sys, GreenSign::advanced, grid, opts);
  const GreenOp ret(adv, GreenSign::retarded);
  return causal_propagator(adv, ret, f);
}

std::vector<char> support_mask(const GridField& f, double rel_tol) {
  const Grid& g = f.grid();
  const double tol = rel_tol * f.max_abs();
  std::vector<char> mask(static_cast<std::size_t>(g.Nt + 1) * g.Nx, 0);
  for (int n = 0; n <= g.Nt; ++n) {
    for (int i = 0; i < g.Nx; ++i) {
      for (int c = 0; c < f.N(); ++c) {
        if (std::abs(f(n, i, c)) > tol) {
          mask[static_cast<std::size_t>(n) * g.Nx + i] = 1;
          break;
        }
      }
    }
  }
  return mask;
}

std::vector<double> level_speeds(const SystemTable& table) {
  std::vector<double> v(table.levels());
  for (int L = 0; L < table.levels(); ++L) v[L] = table.level_speed(L);
  return v;
}

SupportReport check_support(const GridField& field, const std::vector<char>& source_support,
                            const std::vector<double>& level_speed, Side side) {
  const Grid& g = field.grid();
  const int Nx = g.Nx;
  const double inf = std::numeric_limits<double>::infinity();
  const bool half = static_cast<int>(level_speed.size()) == 2 * g.Nt + 1;
  auto speed_between = [&](int n, int m) {
    // Largest speed over the step between integer levels n and m.
    if (half) {
      return std::max({level_speed[2 * n], level_speed[n + m], level_speed[2 * m]});
    }
    return std::max(level_speed[n], level_speed[m]);
  };
  std::vector<double> dist(Nx, inf);
  double outside = 0.0;
  double total = 0.0;
  const int start = side == Side::future ? 0 : g.Nt;
  const int step = side == Side::future ? 1 : -1;
  for (int k = 0; k <= g.Nt; ++k) {
    const int n = start + k * step;
    if (k > 0) {
      const double shrink = speed_between(n - step, n) * g.dt();
      for (auto& d : dist) d = std::max(0.0, d - shrink);
    }
    // Distance to the nearest source node on this level.
    std::vector<int> src;
    for (int i = 0; i < Nx; ++i) {
      if (source_support[static_cast<std::size_t>(n) * Nx + i]) src.push_back(i);
    }
    if (!src.empty()) {
      for (int i = 0; i < Nx; ++i) {
        int best = Nx;
        for (int j : src) {
          const int d = std::abs(i - j);
          best = std::min(best, std::min(d, Nx - d));
        }
        dist[i] = std::min(dist[i], best * g.dx());
      }
    }
    for (int i = 0; i < Nx; ++i) {
      double mass = 0.0;
      for (int c = 0; c < field.N(); ++c) mass += std::norm(field(n, i, c));
      total += mass;
      if (dist[i] > 3.0 * g.dx()) outside += mass;
    }
  }
  SupportReport r;
  r.leakage = total > 0.0 ? outside / total : 0.0;
  r.pass = r.leakage < kLeakageTol;
  return r;
}

}  // namespace mollerlab
