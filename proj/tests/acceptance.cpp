// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any criterion fails.
#include "mollerlab/config.hpp"
#include "mollerlab/dirac.hpp"
#include "mollerlab/experiment.hpp"
#include "mollerlab/green.hpp"
#include "mollerlab/moller.hpp"
#include "mollerlab/qstate.hpp"
#include "mollerlab/wave.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace mollerlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

Metric1p1 ultrastatic() { return Metric1p1::constant(1.0, 1.0, "ultrastatic"); }

Metric1p1 cosmological() {
  return Metric1p1([](double, double) { return 1.0; }, [](double t, double) { return 1.0 + 0.3 * std::tanh(t); },
                   "cosmological");
}

// a1 = 1 + 0.2 sin(x) e^{-t^2}, scaled by 1.3 so that g1's cone lies inside the ultrastatic one.
Metric1p1 modulated() {
  return Metric1p1([](double, double) { return 1.0; },
                   [](double t, double x) { return 1.3 * (1.0 + 0.2 * std::sin(x) * std::exp(-t * t)); },
                   "modulated");
}

Metric1p1 lumpy_static() {
  return Metric1p1([](double, double) { return 1.0; }, [](double, double x) { return 0.8 + 0.16 * std::sin(x); },
                   "lumpy");
}

Metric1p1 bumpy() {
  return Metric1p1([](double t, double x) { return 1.0 + 0.1 * std::sin(x) * std::exp(-t * t); },
                   [](double, double x) { return 1.1 + 0.1 * std::cos(x); }, "bumpy");
}

SliceData slice_of(const Grid& g, int N, const std::function<Complex(int c, double x)>& f) {
  SliceData s(g.Nx, N);
  for (int i = 0; i < g.Nx; ++i) {
    for (int c = 0; c < N; ++c) s(i, c) = f(c, g.x(i));
  }
  return s;
}

double max_error(const GridField& u, int c, const std::function<double(double t, double x)>& exact) {
  const Grid& g = u.grid();
  double err = 0.0;
  for (int n = 0; n <= g.Nt; ++n) {
    for (int i = 0; i < g.Nx; ++i) err = std::max(err, std::abs(u(n, i, c) - exact(g.time(n), g.x(i))));
  }
  return err;
}

GridField dirac_solution(const Metric1p1& g, const Grid& grid, std::uint64_t seed) {
  return solve_cauchy(dirac_system(g), grid, nullptr, smooth_random_slice(grid, 2, seed, FiberKind::complex),
                      Direction::forward);
}

GridField scalar_solution(const Metric1p1& g, const Grid& grid, std::uint64_t seed) {
  return solve_wave(wave_operator(g, 1.0).as_second_order(), grid, nullptr,
                    smooth_random_slice(grid, 1, seed, FiberKind::real),
                    smooth_random_slice(grid, 1, seed + 1000, FiberKind::real))
      .jet;
}

Outcome symbol_conditions() {
  const Grid grid = Grid::make(32, 40, -2.0, 2.0);
  double worst_s = 0.0;
  double min_h = 1e300;
  bool ok = true;
  for (const Metric1p1& g : {ultrastatic(), cosmological()}) {
    for (const SHSystem& sys : {dirac_system(g), reduce_to_shs(wave_operator(g, 1.0))}) {
      const ConditionReport s = check_condition_S(sys, grid);
      const ConditionReport h = check_condition_H(sys, grid);
      worst_s = std::max(worst_s, s.value);
      min_h = std::min(min_h, h.value);
      ok = ok && s.value < 1e-10 && h.pass && h.value > 0.0;
    }
  }
  return {ok, "max S defect " + sci(worst_s) + ", min H margin " + sci(min_h)};
}

// Closed forms on the flat metric: Dirac transport, d'Alembert and a massive plane wave.
struct ClosedForms {
  double transport = 0.0;
  double dalembert = 0.0;
  double massive = 0.0;
};

ClosedForms closed_form_errors(int Nx, int Nt, double T) {
  const Grid g = Grid::make(Nx, Nt, 0.0, T);
  const Metric1p1 flat = ultrastatic();
  ClosedForms e;
  auto tr = [](int c, double t, double x) {
    const double f = std::sin(x + t);
    const double h = std::cos(2.0 * (x - t));
    return c == 0 ? 0.5 * (f + h) : 0.5 * (f - h);
  };
  const GridField psi = solve_cauchy(dirac_system(flat), g, nullptr,
                                     slice_of(g, 2, [&](int c, double x) { return tr(c, 0.0, x); }),
                                     Direction::forward);
  for (int c = 0; c < 2; ++c) {
    e.transport = std::max(e.transport, max_error(psi, c, [&](double t, double x) { return tr(c, t, x); }));
  }
  auto dal = [](double t, double x) { return std::sin(x - t) + std::cos(2 * (x + t)); };
  const WaveSolution s = solve_wave(
      wave_operator(flat, 0.0).as_second_order(), g, nullptr, slice_of(g, 1, [&](int, double x) { return dal(0, x); }),
      slice_of(g, 1, [](int, double x) { return -std::cos(x) - 2 * std::sin(2 * x); }));
  e.dalembert = max_error(s.u, 0, dal);
  const double m = 1.5, k = 4.0, w = std::sqrt(k * k + m * m);
  auto kg = [=](double t, double x) { return std::cos(k * x - w * t); };
  const WaveSolution s2 = solve_wave(
      wave_operator(flat, m).as_second_order(), g, nullptr, slice_of(g, 1, [&](int, double x) { return kg(0, x); }),
      slice_of(g, 1, [&](int, double x) { return w * std::sin(k * x); }));
  e.massive = max_error(s2.u, 0, kg);
  return e;
}

Outcome solver_convergence() {
  const ClosedForms fine = closed_form_errors(64, 400, 2.0);
  const double worst = std::max({fine.transport, fine.dalembert, fine.massive});
  // Temporal order from successive halvings of dt; x is spectral and exact for these modes.
  const std::vector<int> steps = {64, 128, 256};
  std::vector<ClosedForms> errs;
  for (int nt : steps) errs.push_back(closed_form_errors(64, nt, 2.0));
  double order = 1e300;
  for (std::size_t j = 0; j + 1 < errs.size(); ++j) {
    order = std::min({order, std::log2(errs[j].transport / errs[j + 1].transport),
                      std::log2(errs[j].dalembert / errs[j + 1].dalembert),
                      std::log2(errs[j].massive / errs[j + 1].massive)});
  }
  return {worst < 1e-5 && order >= 3.8,
          "errors transport " + sci(fine.transport) + ", d'Alembert " + sci(fine.dalembert) + ", massive " +
              sci(fine.massive) + " at Nx=64; min temporal order " + fixed(order)};
}

Outcome green_identities() {
  double inverse = 0.0, exact = 0.0, leak = 0.0;
  {
    const Grid grid = Grid::make(64, 400, 0.0, 2.0);
    for (const SHSystem& sys : {dirac_system(bumpy()), reduce_to_shs(wave_operator(bumpy(), 1.0))}) {
      const GreenOp adv(sys, GreenSign::advanced, grid);
      const GreenOp ret(adv, GreenSign::retarded);
      const GridField f = bump_source(grid, sys.N, BumpSpec{1.0, std::numbers::pi, 0.5, 1.0, 0});
      const double fm = f.max_abs();
      const GridField gp = adv.apply(f);
      const GridField gm = ret.apply(f);
      const GridField sf = apply_system(sys, f);
      inverse = std::max({inverse, max_diff(apply_system(sys, gp), f) / fm, max_diff(apply_system(sys, gm), f) / fm,
                          max_diff(adv.apply(sf), f) / fm, max_diff(ret.apply(sf), f) / fm});
      exact = std::max({exact, apply_system(sys, gp - gm).max_abs() / fm,
                        causal_propagator(adv, ret, sf).max_abs() / fm});
    }
  }
  {
    const Grid grid = Grid::make(128, 200, 0.0, 2.0);
    for (const SHSystem& sys : {dirac_system(bumpy()), reduce_to_shs(wave_operator(bumpy(), 1.0))}) {
      const GreenOp adv(sys, GreenSign::advanced, grid);
      const GreenOp ret(adv, GreenSign::retarded);
      const GridField f = bump_source(grid, sys.N, BumpSpec{1.0, std::numbers::pi, 0.2, 1.0, sys.N - 1});
      const auto mask = support_mask(f);
      const auto speeds = level_speeds(adv.table());
      leak = std::max({leak, check_support(adv.apply(f), mask, speeds, Side::future).leakage,
                       check_support(ret.apply(f), mask, speeds, Side::past).leakage});
    }
  }
  return {inverse < 1e-5 && exact < 1e-5 && leak < 1e-6,
          "inverse " + sci(inverse) + ", exactness " + sci(exact) + ", leakage " + sci(leak)};
}

Outcome intertwining() {
  const Grid grid = Grid::make(64, 400, -2.0, 2.0);
  const ChiProfile chi(-1.4, 1.4);
  const Metric1p1 g0 = ultrastatic();
  const Metric1p1 g1 = modulated();
  const ConeReport cone = cone_dominates(g0, g1, grid);
  const MollerMap dirac(dirac_moller_systems(g0, g1, rho_from_volumes(g0, g1), chi, grid), chi, grid);
  const MollerMap scalar(wave_moller_systems(wave_operator(g0, 1.0), wave_operator(g1, 1.0), rho_from_volumes(g0, g1),
                                             chi),
                         chi, grid);
  double inter = 0.0, round = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const GridField psi = dirac_solution(g0, grid, seed);
    const GridField rpsi = dirac.apply(psi);
    inter = std::max(inter, intertwining_residual(dirac, psi, rpsi));
    round = std::max(round, roundtrip_residual(dirac, psi, rpsi));
    const GridField u = scalar_solution(g0, grid, seed);
    const GridField ru = scalar.apply(u);
    inter = std::max(inter, intertwining_residual(scalar, u, ru));
    round = std::max(round, roundtrip_residual(scalar, u, ru));
  }
  return {cone.dominates && inter < 1e-5 && round < 1e-5,
          "10 Dirac + 10 scalar solutions: intertwining " + sci(inter) + ", round trip " + sci(round) +
              ", cone margin " + sci(cone.margin)};
}

Outcome conservation() {
  const Grid grid = Grid::make(64, 400, -2.0, 2.0);
  const ChiProfile chi(-1.4, 1.4);
  const Metric1p1 flat = ultrastatic();
  const Metric1p1 g1 = modulated();
  const MollerMap dirac(dirac_moller_systems(flat, g1, rho_from_volumes(flat, g1), chi, grid), chi, grid);
  const ConservationReport cd =
      conserve_dirac(dirac, flat, g1, dirac_solution(flat, grid, 21), dirac_solution(flat, grid, 22));
  const Metric1p1 g0 = lumpy_static();
  const MollerMap scalar(wave_moller_systems(wave_operator(g0, 1.0), wave_operator(flat, 1.0),
                                             rho_from_volumes(g0, flat), chi),
                         chi, grid);
  const ConservationReport cs =
      conserve_wave(scalar, g0, flat, scalar_solution(g0, grid, 23), scalar_solution(g0, grid, 25));
  // Negative control: volume ratio 4 and rho = 1.
  const Metric1p1 heavy = Metric1p1::constant(4.0, 4.0, "ratio4");
  const MollerMap bare(dirac_moller_systems(heavy, flat, RhoWeight::unit(), chi, grid), chi, grid);
  const GridField psi = dirac_solution(heavy, grid, 24);
  const ConservationReport cn = conserve_dirac(bare, heavy, flat, psi, psi);
  const double ratio = cn.before.real() / cn.after.real();
  return {cd.relative_error < 1e-5 && cs.relative_error < 1e-5 && std::abs(ratio - 4.0) < 1e-3,
          "Dirac " + sci(cd.relative_error) + ", symplectic " + sci(cs.relative_error) +
              ", control ratio without rho " + fixed(ratio)};
}

Outcome slice_independence() {
  const Grid grid = Grid::make(64, 400, -2.0, 2.0);
  double worst = 0.0;
  for (const Metric1p1& g : {cosmological(), modulated()}) {
    const GridField psi = dirac_solution(g, grid, 31);
    const GridField phi = dirac_solution(g, grid, 32);
    const Complex q0 = spin_scalar_product(g, psi, phi, 0);
    for (int n = 0; n <= grid.Nt; ++n) {
      worst = std::max(worst, std::abs(spin_scalar_product(g, psi, phi, n) - q0) / std::abs(q0));
    }
  }
  for (const Metric1p1& g : {cosmological(), lumpy_static()}) {
    const GridField u = scalar_solution(g, grid, 33);
    const GridField v = scalar_solution(g, grid, 35);
    const Complex s0 = symplectic_form(g, u, v, 0);
    for (int n = 0; n <= grid.Nt; ++n) {
      worst = std::max(worst, std::abs(symplectic_form(g, u, v, n) - s0) / std::abs(s0));
    }
  }
  return {worst < 1e-6, "max relative drift " + sci(worst)};
}

Outcome state_pullback() {
  constexpr int kModes = 64;
  const Grid grid = Grid::make(256, 800, -0.3125, 0.3125);
  const ChiProfile chi(-0.25, 0.25);
  const Metric1p1 g0 = lumpy_static();
  const Metric1p1 g1 = ultrastatic();
  const WaveOperator P0 = wave_operator(g0, 1.0);
  const MollerMap M(wave_moller_systems(P0, wave_operator(g1, 1.0), rho_from_volumes(g0, g1), chi), chi, grid);
  const TwoPointKernel w1 = ultrastatic_ground_state(1.0, grid.Nx / 2 - 1, grid.time(M.level_plus()));
  const TwoPointKernel w0 = pullback_state(w1, M, kModes);
  const TwoPointKernel ref = static_ground_state(P0, grid, grid.time(M.level_minus()), kModes);
  const DecayReport d = smoothness_proxy(w0, ref);
  const double pos = w0.positivity_margin();
  const double comm = w0.commutator_defect();
  return {pos >= -1e-8 && comm < 1e-5 && d.slope <= -2.0,
          "min eigenvalue " + sci(pos) + ", commutator " + sci(comm) + ", proxy slope " + fixed(d.slope) +
              " (K=64, mode-decay proxy)"};
}

Outcome kappa_properties() {
  const auto sp = SpinorRealization::standard();
  double worst = 0.0;
  double ode = 0.0;
  for (const Metric1p1& g0 : {ultrastatic(), cosmological()}) {
    const Metric1p1 g1 = modulated();
    const KappaSpin k = kappa_spin(g0, g1, rho_from_volumes(g0, g1));
    ode = std::max(ode, k.ode_error);
    for (double t : {-1.5, -0.3, 0.0, 0.8, 1.7}) {
      for (double x : {0.0, 0.9, 2.5, 4.1, 5.9}) {
        const FiberMatrix kap = k.kappa(t, x);
        for (int mu = 0; mu < 2; ++mu) worst = std::max(worst, (kap * sp.gamma(mu) - sp.gamma(mu) * kap).norm());
        worst = std::max(worst, (kap.adjoint() * sp.H_spin * kap - sp.H_spin).norm());
      }
    }
  }
  return {worst < 1e-10 && ode < 1e-10,
          "Clifford and isometry defect " + sci(worst) + ", transport error " + sci(ode)};
}

const char* kDeterminismConfig = R"cfg([experiment]
field = dirac
seed = 5
samples = 2

[grid]
Nx = 32
Nt = 200
t0 = -2
t1 = 2

[g1]
a = "1.3*(1 + 0.2*sin(x)*exp(-t^2))"

[chi]
t_minus = -1.4
t_plus = 1.4
)cfg";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  std::istringstream is(kDeterminismConfig);
  const ExperimentConfig cfg = parse_config(is, "determinism");
  const fs::path root = fs::temp_directory_path() / "mollerlab_acceptance";
  fs::remove_all(root);
  int files = 0;
  bool same = true;
  for (Command c : {Command::solve, Command::moller, Command::conserve}) {
    for (const char* run : {"a", "b"}) write_report(run_experiment(cfg, c), c, (root / run).string());
  }
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".meta.json")) continue;
    same = same && slurp(entry.path()) == slurp(root / "b" / name);
    ++files;
  }
  fs::remove_all(root);
  return {same && files > 0, std::to_string(files) + " report files compared byte for byte"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"symbol conditions", symbol_conditions}, {"solver convergence", solver_convergence},
      {"Green identities", green_identities},   {"intertwining", intertwining},
      {"conservation", conservation},           {"slice independence", slice_independence},
      {"state pullback", state_pullback},       {"kappa properties", kappa_properties},
      {"determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %d %-20s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
