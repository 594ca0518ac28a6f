#include "mollerlab/config.hpp"
#include "mollerlab/experiment.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

int fail(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::ordered_json{{"error", kind}, {"message", message}}.dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moller operator laboratory for 1+1 dimensional field theories"};
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  bool no_rho = false;
  bool fd4 = false;
  std::optional<double> cfl;
  app.add_option("command", command, "check | solve | green | moller | conserve | state")->required();
  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_flag("--no-rho", no_rho, "use rho = 1 instead of sqrt(a0/a1)");
  app.add_flag("--fd4", fd4, "fourth-order finite differences in x instead of spectral");
  app.add_option("--cfl", cfl, "CFL number");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const mollerlab::Command cmd = mollerlab::parse_command(command);
    mollerlab::ExperimentConfig cfg = mollerlab::load_config(config_path);
    if (no_rho) cfg.use_rho = false;
    if (fd4) cfg.solver.deriv = mollerlab::DerivMode::fd4;
    if (cfl) cfg.solver.cfl = *cfl;
    if (out_dir) cfg.out_dir = *out_dir;
    const mollerlab::ExperimentReport report = mollerlab::run_experiment(cfg, cmd);
    mollerlab::write_report(report, cmd, cfg.out_dir);
    std::cout << command << ": " << (report.pass ? "pass" : "FAIL") << " (" << cfg.out_dir << "/" << command
              << ".json)\n";
    return report.pass ? 0 : 1;
  } catch (const mollerlab::ConfigError& e) {
    return fail("config", e.what());
  } catch (const mollerlab::DomainError& e) {
    return fail("domain", e.what());
  } catch (const mollerlab::StabilityError& e) {
    return fail("stability", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
