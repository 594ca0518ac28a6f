#pragma once

#include "mollerlab/expr.hpp"
#include "mollerlab/geom.hpp"
#include "mollerlab/grid.hpp"
#include "mollerlab/shs.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace mollerlab {

enum class FieldKind { dirac, scalar };

struct MetricExprs {
  Expr beta;
  Expr a;
};

struct Tolerances {
  double residual = 1e-5;
  double conservation = 1e-5;
  double leakage = 1e-6;
  double symbol = 1e-10;
};

struct ExperimentConfig {
  FieldKind field = FieldKind::dirac;
  MetricExprs g0{parse_expr("1"), parse_expr("1")};
  MetricExprs g1{parse_expr("1"), parse_expr("1")};
  std::optional<Expr> V;  // defaults to mass^2
  double mass = 1.0;
  Grid grid;
  double t_minus = 0.0;
  double t_plus = 0.0;
  SolveOptions solver;
  Tolerances tol;
  int modes = 16;             // mode cutoff K for the state command
  std::uint64_t seed = 1;     // seed for random homogeneous data
  int samples = 3;            // random solutions per residual check
  bool use_rho = true;
  std::string out_dir = "out";

  [[nodiscard]] Metric1p1 metric0() const;
  [[nodiscard]] Metric1p1 metric1() const;
  [[nodiscard]] ScalarFn potential() const;
  [[nodiscard]] ChiProfile chi() const { return ChiProfile(t_minus, t_plus); }
};

// Sectioned key-value text: [section] then key = value; expressions may be double-quoted; full-line comments start with ; or #.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);
// Throws ConfigError with a specific message for every ordering or range violation.
void validate(const ExperimentConfig& cfg);

std::string to_string(FieldKind kind);

}  // namespace mollerlab
