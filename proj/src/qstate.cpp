#include "mollerlab/qstate.hpp"

#include "mollerlab/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace mollerlab {

namespace {

// Forward DFT of one periodic sequence.
std::vector<Complex> dft(std::span<const Complex> f) {
  const int n = static_cast<int>(f.size());
  std::vector<Complex> out(f.begin(), f.end());
  auto* buf = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

int mode_index(int k, int K) { return k + K; }

double bracket(int k) { return std::sqrt(1.0 + static_cast<double>(k) * k); }

// Canonical basis data (u, p) = e^{ikx}/sqrt(2 pi) in one slot, written as a jet at time t.
std::vector<SliceData> basis_jets(const Grid& grid, const Metric1p1& metric, double t, int K) {
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<SliceData> out;
  out.reserve(2 * (2 * K + 1));
  for (int k = -K; k <= K; ++k) {
    for (int c = 0; c < 2; ++c) {
      SliceData s(grid.Nx, 3);
      for (int i = 0; i < grid.Nx; ++i) {
        const double x = grid.x(i);
        const Complex e = norm * std::exp(Complex(0.0, k * x));
        if (c == 0) {
          s(i, 1) = Complex(0.0, k) * e;
          s(i, 2) = e;
        } else {
          s(i, 0) = metric.beta(t, x) / metric.a(t, x) * e;
        }
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

void apply_fiber(const MatrixFn& K, double t, const Grid& grid, std::vector<SliceData>& data) {
  std::vector<FiberMatrix> mats(grid.Nx);
  for (int i = 0; i < grid.Nx; ++i) mats[i] = K(t, grid.x(i));
  for (auto& s : data) {
    for (int i = 0; i < grid.Nx; ++i) s.set_node(i, mats[i] * s.node(i));
  }
}

Eigen::MatrixXcd canonical_modes(const Grid& grid, const Metric1p1& metric, double t,
                                 const std::vector<SliceData>& jets, int K) {
  Eigen::MatrixXcd E(2 * (2 * K + 1), static_cast<Eigen::Index>(jets.size()));
  std::vector<Complex> u(grid.Nx), p(grid.Nx);
  std::vector<double> w(grid.Nx);
  for (int i = 0; i < grid.Nx; ++i) w[i] = metric.a(t, grid.x(i)) / metric.beta(t, grid.x(i));
  for (std::size_t col = 0; col < jets.size(); ++col) {
    for (int i = 0; i < grid.Nx; ++i) {
      u[i] = jets[col](i, 2);
      p[i] = w[i] * jets[col](i, 0);
    }
    E.col(static_cast<Eigen::Index>(col)) = mode_data(u, p, K);
  }
  return E;
}

}  // namespace

ModeVector mode_data(std::span<const Complex> u, std::span<const Complex> p, int K) {
  const int n = static_cast<int>(u.size());
  if (static_cast<int>(p.size()) != n) throw DomainError("mode_data: u and p sizes differ");
  if (2 * K >= n) throw DomainError("mode_data: cutoff K must stay below Nx/2");
  const std::vector<Complex> fu = dft(u);
  const std::vector<Complex> fp = dft(p);
  const double scale = (2.0 * std::numbers::pi / n) / std::sqrt(2.0 * std::numbers::pi);
  ModeVector out(2 * (2 * K + 1));
  for (int k = -K; k <= K; ++k) {
    const int j = ((k % n) + n) % n;
    out(2 * mode_index(k, K)) = scale * fu[j];
    out(2 * mode_index(k, K) + 1) = scale * fp[j];
  }
  return out;
}

TwoPointKernel::TwoPointKernel(int K, double t_ref, std::string label, Eigen::MatrixXcd W)
    : k_(K), t_ref_(t_ref), label_(std::move(label)), w_(std::move(W)) {
  if (K < 0 || w_.rows() != 2 * (2 * K + 1) || w_.cols() != w_.rows()) {
    throw DomainError("two-point kernel size does not match the mode cutoff");
  }
}

Eigen::Matrix2cd TwoPointKernel::block(int k) const {
  const int j = 2 * mode_index(k, k_);
  return w_.block<2, 2>(j, j);
}

Complex TwoPointKernel::operator()(const ModeVector& f, const ModeVector& g) const { return f.dot(w_ * g); }

double TwoPointKernel::positivity_margin() const {
  const Eigen::MatrixXcd h = 0.5 * (w_ + w_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double TwoPointKernel::commutator_defect() const {
  const int dim = static_cast<int>(w_.rows());
  auto reflect = [this](int r) {
    const int j = r / 2;
    return 2 * (2 * k_ - j) + r % 2;
  };
  double d = 0.0;
  for (int r = 0; r < dim; ++r) {
    for (int s = 0; s < dim; ++s) {
      Complex expect = 0.0;
      if (r / 2 == s / 2 && r != s) expect = Complex(0.0, r % 2 == 0 ? 1.0 : -1.0);
      const Complex a = w_(r, s) - std::conj(w_(reflect(r), reflect(s)));
      d = std::max(d, std::abs(a - expect));
    }
  }
  return d;
}

nlohmann::json TwoPointKernel::to_json() const {
  nlohmann::json blocks = nlohmann::json::array();
  for (int k = -k_; k <= k_; ++k) {
    const Eigen::Matrix2cd b = block(k);
    nlohmann::json entry = nlohmann::json::array();
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) entry.push_back({b(r, c).real(), b(r, c).imag()});
    }
    blocks.push_back(std::move(entry));
  }
  return {{"K", k_}, {"t_ref", t_ref_}, {"label", label_}, {"blocks", std::move(blocks)}};
}

TwoPointKernel ultrastatic_ground_state(double m, int K, double t_ref) {
  if (!(m > 0.0)) throw DomainError("ground state needs mass > 0: the zero mode has no ground state");
  const int dim = 2 * (2 * K + 1);
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = -K; k <= K; ++k) {
    const double w = std::sqrt(static_cast<double>(k) * k + m * m);
    const int j = 2 * mode_index(k, K);
    W(j, j) = 0.5 * w;
    W(j, j + 1) = Complex(0.0, 0.5);
    W(j + 1, j) = Complex(0.0, -0.5);
    W(j + 1, j + 1) = 0.5 / w;
  }
  return TwoPointKernel(K, t_ref, "ground(m=" + nlohmann::json(m).dump() + ")", std::move(W));
}

TwoPointKernel static_ground_state(const WaveOperator& P, const Grid& grid, double t, int K) {
  const int n = grid.Nx;
  if (2 * K >= n) throw DomainError("static_ground_state: cutoff K must stay below Nx/2");
  const double dx = grid.dx();
  // H = 1/2 sum_j (beta/a)_j P_j^2 / dx + 1/2 u^T dx (D^T diag(beta/a) D + diag(beta a V)) u, P_j = p_j dx.
  Eigen::MatrixXd D(n, n);
  for (int j = 0; j < n; ++j) {
    SliceData e(n, 1);
    e(j, 0) = 1.0;
    const SliceData de = d_dx(e);
    for (int i = 0; i < n; ++i) D(i, j) = de(i, 0).real();
  }
  Eigen::VectorXd ratio(n), pot(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double beta = P.metric.beta(t, x);
    const double a = P.metric.a(t, x);
    ratio(i) = beta / a;
    pot(i) = beta * a * P.V(t, x);
    if (!(pot(i) > 0.0)) throw DomainError("static_ground_state needs V > 0: the zero mode has no ground state");
  }
  Eigen::MatrixXd stiff = dx * (D.transpose() * ratio.asDiagonal() * D);
  stiff.diagonal() += dx * pot;
  // With u = s y, P = pi / s the Hamiltonian is 1/2 |pi|^2 + 1/2 y^T (s stiff s) y.
  const Eigen::VectorXd s = (ratio / dx).cwiseSqrt();
  const Eigen::MatrixXd A = s.asDiagonal() * stiff * s.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
  const Eigen::VectorXd omega = es.eigenvalues().cwiseSqrt();
  const Eigen::MatrixXd& Q = es.eigenvectors();
  const Eigen::MatrixXd cov_u =
      0.5 * s.asDiagonal() * (Q * omega.cwiseInverse().asDiagonal() * Q.transpose()) * s.asDiagonal();
  const Eigen::MatrixXd cov_p = 0.5 / (dx * dx) * s.cwiseInverse().asDiagonal() *
                                (Q * omega.asDiagonal() * Q.transpose()) * s.cwiseInverse().asDiagonal();
  const int m = 2 * K + 1;
  Eigen::MatrixXcd F(m, n);
  const double norm = dx / std::sqrt(2.0 * std::numbers::pi);
  for (int k = -K; k <= K; ++k) {
    for (int j = 0; j < n; ++j) F(mode_index(k, K), j) = norm * std::exp(Complex(0.0, -k * grid.x(j)));
  }
  // Test data with u-slot e^{ikx} smear the field momentum, p-slot data smear -u.
  const Eigen::MatrixXcd pp = F * cov_p * F.adjoint();
  const Eigen::MatrixXcd uu = F * cov_u * F.adjoint();
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      W(2 * r, 2 * c) = pp(r, c);
      W(2 * r + 1, 2 * c + 1) = uu(r, c);
    }
    W(2 * r, 2 * r + 1) = Complex(0.0, 0.5);
    W(2 * r + 1, 2 * r) = Complex(0.0, -0.5);
  }
  return TwoPointKernel(K, t, "ground(" + P.metric.label() + ")", std::move(W));
}

Complex quasifree_n_point(const TwoPointKernel& w, std::span<const ModeVector> f) {
  const std::size_t n = f.size();
  if (n % 2 == 1) return 0.0;
  if (n > 6) throw DomainError("quasifree_n_point supports n <= 6");
  if (n == 0) return 1.0;
  std::vector<char> used(n, 0);
  std::function<Complex()> rec = [&]() -> Complex {
    std::size_t i = 0;
    while (i < n && used[i]) ++i;
    if (i == n) return 1.0;
    used[i] = 1;
    Complex sum = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      sum += w(f[i], f[j]) * rec();
      used[j] = 0;
    }
    used[i] = 0;
    return sum;
  };
  return rec();
}

Eigen::MatrixXcd pullback_transfer(const MollerMap& M, int K0, int K1) {
  const Grid& g = M.grid();
  const MollerSystems& s = M.systems();
  const double tm = g.time(M.level_minus());
  const double tp = g.time(M.level_plus());
  std::vector<SliceData> data = basis_jets(g, s.sys0.metric, tm, K0);
  apply_fiber(s.K.value, tm, g, data);
  data = M.transport_data(std::move(data));
  return canonical_modes(g, s.sys1.metric, tp, data, K1);
}

Eigen::MatrixXcd pushforward_transfer(const MollerMap& M, int K1, int K0) {
  const Grid& g = M.grid();
  const MollerSystems& s = M.systems();
  const double tm = g.time(M.level_minus());
  const double tp = g.time(M.level_plus());
  std::vector<SliceData> data = basis_jets(g, s.sys1.metric, tp, K1);
  data = evolve_batch(s.sys_chi, g, std::move(data), M.level_plus(), M.level_minus(), M.options());
  apply_fiber(s.K.inverse_map().value, tm, g, data);
  return canonical_modes(g, s.sys0.metric, tm, data, K0);
}

Eigen::MatrixXcd identification_transfer(const MollerMap& M, int K0, int K1) {
  const Grid& g = M.grid();
  const MollerSystems& s = M.systems();
  const double tm = g.time(M.level_minus());
  std::vector<SliceData> data = basis_jets(g, s.sys0.metric, tm, K0);
  apply_fiber(s.K.value, tm, g, data);
  return canonical_modes(g, s.sys1.metric, tm, data, K1);
}

TwoPointKernel pullback_state(const TwoPointKernel& w1, const MollerMap& M, int K0) {
  const Eigen::MatrixXcd E = pullback_transfer(M, K0, w1.K());
  return TwoPointKernel(K0, M.grid().time(M.level_minus()), "pullback(" + w1.label() + ")",
                        E.adjoint() * w1.matrix() * E);
}

TwoPointKernel pushforward_state(const TwoPointKernel& w0, const MollerMap& M, int K1) {
  const Eigen::MatrixXcd F = pushforward_transfer(M, K1, w0.K());
  return TwoPointKernel(K1, M.grid().time(M.level_plus()), "pushforward(" + w0.label() + ")",
                        F.adjoint() * w0.matrix() * F);
}

TwoPointKernel identification_state(const TwoPointKernel& w1, const MollerMap& M, int K0) {
  const Eigen::MatrixXcd L = identification_transfer(M, K0, w1.K());
  return TwoPointKernel(K0, M.grid().time(M.level_minus()), "identified(" + w1.label() + ")",
                        L.adjoint() * w1.matrix() * L);
}

DecayReport smoothness_proxy(const TwoPointKernel& a, const TwoPointKernel& b) {
  if (a.K() != b.K()) throw ConfigError("smoothness proxy needs kernels with the same cutoff");
  if (a.K() < kMinProxyModes) throw ConfigError("smoothness proxy needs K >= 16 for a reliable fit");
  DecayReport r;
  r.K = a.K();
  r.d.assign(r.K + 1, 0.0);
  for (int k = 0; k <= r.K; ++k) {
    for (int sgn : {1, -1}) {
      Eigen::Matrix2cd diff = a.block(sgn * k) - b.block(sgn * k);
      diff(0, 0) /= bracket(k) * bracket(k);
      r.d[k] = std::max(r.d[k], diff.norm());
    }
  }
  double peak = 0.0;
  for (int k = 1; k <= r.K; ++k) {
    peak = std::max(peak, r.d[k]);
    r.sup_q2 = std::max(r.sup_q2, r.d[k] * k * k);
    r.sup_q4 = std::max(r.sup_q4, r.d[k] * std::pow(k, 4));
  }
  if (peak == 0.0 && r.d[0] == 0.0) {
    r.identical = true;
    r.pass = true;
    return r;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (int k = std::max(1, r.K / 4); k <= r.K; ++k) {
    if (r.d[k] <= 0.0) continue;
    const double x = std::log(k);
    const double y = std::log(r.d[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count >= 2) r.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  r.pass = count >= 2 && r.slope < -1.0;
  return r;
}

double kernel_distance(const TwoPointKernel& a, const TwoPointKernel& b) {
  if (a.K() != b.K()) throw DomainError("kernel_distance needs equal cutoffs");
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace mollerlab
