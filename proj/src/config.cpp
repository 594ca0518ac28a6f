#include "mollerlab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mollerlab {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment", {"field", "seed", "samples"}},
      {"grid", {"Nx", "Nt", "t0", "t1"}},
      {"g0", {"beta", "a"}},
      {"g1", {"beta", "a"}},
      {"field", {"mass", "V"}},
      {"chi", {"t_minus", "t_plus"}},
      {"solver", {"cfl", "deriv"}},
      {"tolerances", {"residual", "conservation", "leakage", "symbol"}},
      {"state", {"modes"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string source) : tree_(tree), source_(std::move(source)) {}

  [[nodiscard]] std::optional<std::string> raw(const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return unquote(*v);
  }

  template <typename T>
  [[nodiscard]] T number(const std::string& key, T fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    std::istringstream is(*v);
    T out{};
    is >> out;
    if (is.fail() || !(is >> std::ws).eof()) fail(key, "expected a number, got '" + *v + "'");
    return out;
  }

  [[nodiscard]] Expr expr(const std::string& key, const std::string& fallback) const {
    const std::string text = raw(key).value_or(fallback);
    try {
      return parse_expr(text);
    } catch (const ParseError& e) {
      fail(key, std::string(e.what()) + " in '" + text + "'");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(source_ + ": " + key + ": " + msg);
  }

 private:
  const pt::ptree& tree_;
  std::string source_;
};

void check_keys(const pt::ptree& tree, const std::string& source) {
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = keys.find(section);
    if (it == keys.end()) throw ConfigError(source + ": unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError(source + ": unknown key " + section + "." + key);
    }
  }
}

}  // namespace

std::string to_string(FieldKind kind) { return kind == FieldKind::dirac ? "dirac" : "scalar"; }

Metric1p1 ExperimentConfig::metric0() const { return Metric1p1(g0.beta.as_fn(), g0.a.as_fn(), "g0"); }
Metric1p1 ExperimentConfig::metric1() const { return Metric1p1(g1.beta.as_fn(), g1.a.as_fn(), "g1"); }

ScalarFn ExperimentConfig::potential() const {
  if (V) return V->as_fn();
  const double m2 = mass * mass;
  return [m2](double, double) { return m2; };
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_keys(tree, source);
  const Reader r(tree, source);
  ExperimentConfig cfg;

  const std::string field = r.raw("experiment.field").value_or("dirac");
  if (field == "dirac") {
    cfg.field = FieldKind::dirac;
  } else if (field == "scalar") {
    cfg.field = FieldKind::scalar;
  } else {
    r.fail("experiment.field", "expected dirac or scalar, got '" + field + "'");
  }
  cfg.seed = r.number<std::uint64_t>("experiment.seed", cfg.seed);
  cfg.samples = r.number<int>("experiment.samples", cfg.samples);

  const int Nx = r.number<int>("grid.Nx", 64);
  const int Nt = r.number<int>("grid.Nt", 400);
  const double t0 = r.number<double>("grid.t0", -2.0);
  const double t1 = r.number<double>("grid.t1", 2.0);
  try {
    cfg.grid = Grid::make(Nx, Nt, t0, t1);
  } catch (const ConfigError& e) {
    r.fail("grid", e.what());
  }

  cfg.g0 = MetricExprs{r.expr("g0.beta", "1"), r.expr("g0.a", "1")};
  cfg.g1 = MetricExprs{r.expr("g1.beta", "1"), r.expr("g1.a", "1")};
  cfg.mass = r.number<double>("field.mass", cfg.mass);
  if (r.raw("field.V")) cfg.V = r.expr("field.V", "0");

  cfg.t_minus = r.number<double>("chi.t_minus", t0 + 0.3 * (t1 - t0));
  cfg.t_plus = r.number<double>("chi.t_plus", t0 + 0.7 * (t1 - t0));

  cfg.solver.cfl = r.number<double>("solver.cfl", cfg.solver.cfl);
  const std::string deriv = r.raw("solver.deriv").value_or("spectral");
  if (deriv == "spectral") {
    cfg.solver.deriv = DerivMode::spectral;
  } else if (deriv == "fd4") {
    cfg.solver.deriv = DerivMode::fd4;
  } else {
    r.fail("solver.deriv", "expected spectral or fd4, got '" + deriv + "'");
  }

  cfg.tol.residual = r.number<double>("tolerances.residual", cfg.tol.residual);
  cfg.tol.conservation = r.number<double>("tolerances.conservation", cfg.tol.conservation);
  cfg.tol.leakage = r.number<double>("tolerances.leakage", cfg.tol.leakage);
  cfg.tol.symbol = r.number<double>("tolerances.symbol", cfg.tol.symbol);
  cfg.modes = r.number<int>("state.modes", cfg.modes);
  cfg.out_dir = r.raw("output.dir").value_or(cfg.out_dir);

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, path);
}

void validate(const ExperimentConfig& cfg) {
  const Grid& g = cfg.grid;
  if (!(g.t0 < cfg.t_minus)) throw ConfigError("ordering violated: grid.t0 must be < chi.t_minus");
  if (!(cfg.t_minus < cfg.t_plus)) throw ConfigError("ordering violated: chi.t_minus must be < chi.t_plus");
  if (!(cfg.t_plus < g.t1)) throw ConfigError("ordering violated: chi.t_plus must be < grid.t1");
  if (!(cfg.solver.cfl > 0.0)) throw ConfigError("solver.cfl must be > 0");
  if (!(cfg.mass >= 0.0)) throw ConfigError("field.mass must be >= 0");
  if (cfg.samples < 1) throw ConfigError("experiment.samples must be >= 1");
  if (cfg.field == FieldKind::scalar && (cfg.modes < 1 || 2 * cfg.modes >= g.Nx)) throw ConfigError("state.modes must lie in [1, Nx/2)");
  for (double v : {cfg.tol.residual, cfg.tol.conservation, cfg.tol.leakage, cfg.tol.symbol}) {
    if (!(v > 0.0)) throw ConfigError("tolerances must be > 0");
  }
}

}  // namespace mollerlab
