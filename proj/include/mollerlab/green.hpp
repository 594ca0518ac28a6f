#pragma once

#include "mollerlab/grid.hpp"
#include "mollerlab/kernels.hpp"
#include "mollerlab/shs.hpp"

#include <memory>
#include <vector>

namespace mollerlab {

enum class GreenSign { advanced, retarded };

// Advanced: zero data at t0, solve forward. Retarded: zero data at t1, solve backward.
class GreenOp {
 public:
  GreenOp(SHSystem sys, GreenSign sign, const Grid& grid, SolveOptions opts = {});
  // Shares the coefficient table of another operator on the same system and grid.
  GreenOp(const GreenOp& other, GreenSign sign);

  [[nodiscard]] GridField apply(const GridField& f) const;
  [[nodiscard]] GreenSign sign() const { return sign_; }
  [[nodiscard]] const SHSystem& system() const { return sys_; }
  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const SystemTable& table() const { return *table_; }
  [[nodiscard]] const SolveOptions& options() const { return opts_; }

 private:
  SHSystem sys_;
  GreenSign sign_;
  Grid grid_;
  SolveOptions opts_;
  std::shared_ptr<const SystemTable> table_;
};

// Throws ConfigError("support reaches grid boundary ...") unless f vanishes on the two levels at the start side.
void require_margin(const GridField& f, GreenSign sign);

// G^+ f - G^- f.
GridField causal_propagator(const GreenOp& advanced, const GreenOp& retarded, const GridField& f);
GridField causal_propagator(const SHSystem& sys, const Grid& grid, const GridField& f, const SolveOptions& opts = {});

enum class Side { future, past };

struct SupportReport {
  double leakage = 0.0;
  bool pass = true;
};

inline constexpr double kLeakageTol = 1e-6;

// Mass fraction of field outside the cone grown from the source support at the per-level speeds
// (length 2Nt+1 half levels, or Nt+1 integer levels), inflated by 3 dx.
SupportReport check_support(const GridField& field, const std::vector<char>& source_support,
                            const std::vector<double>& level_speed, Side side);
// Support mask of a field: nodes where any component exceeds rel_tol times the peak.
std::vector<char> support_mask(const GridField& f, double rel_tol = 0.0);
std::vector<double> level_speeds(const SystemTable& table);

}  // namespace mollerlab
