#pragma once

#include "mollerlab/config.hpp"
#include "mollerlab/grid.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mollerlab {

enum class Command { check, solve, green, moller, conserve, state };

// ConfigError for unknown names.
Command parse_command(std::string_view name);
std::string to_string(Command c);

struct Artifact {
  std::string name;
  std::string content;
};

struct ExperimentReport {
  nlohmann::ordered_json payload;
  bool pass = false;
  std::vector<Artifact> artifacts;
};

// Smooth periodic slice with modes |k| <= 4 and seeded coefficients; real fibers give real values.
SliceData smooth_random_slice(const Grid& grid, int N, std::uint64_t seed, FiberKind kind);

ExperimentReport run_experiment(const ExperimentConfig& cfg, Command command);

// Writes <command>.json, the CSV artifacts and a <command>.meta.json sidecar with the wall-clock time.
void write_report(const ExperimentReport& report, Command command, const std::string& dir);

}  // namespace mollerlab
