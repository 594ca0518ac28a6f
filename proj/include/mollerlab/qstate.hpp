#pragma once

#include "mollerlab/grid.hpp"
#include "mollerlab/moller.hpp"
#include "mollerlab/types.hpp"

#include "json.hpp"

#include <span>
#include <string>
#include <vector>

namespace mollerlab {

// Mode coordinates of Cauchy data: entry 2(k+K) is u_k, entry 2(k+K)+1 is p_k, k = -K..K.
using ModeVector = Eigen::VectorXcd;

// c_k = (dx/sqrt(2 pi)) sum_j f_j e^{-i k x_j} for |k| <= K; u and p are nodal values on one slice.
ModeVector mode_data(std::span<const Complex> u, std::span<const Complex> p, int K);

// Two-point function w(xi, xi') = xi^dagger W xi' in mode coordinates on a slice.
class TwoPointKernel {
 public:
  TwoPointKernel(int K, double t_ref, std::string label, Eigen::MatrixXcd W);

  [[nodiscard]] int K() const { return k_; }
  [[nodiscard]] int modes() const { return 2 * k_ + 1; }
  [[nodiscard]] double t_ref() const { return t_ref_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] const Eigen::MatrixXcd& matrix() const { return w_; }
  // Diagonal 2x2 block of mode k.
  [[nodiscard]] Eigen::Matrix2cd block(int k) const;

  [[nodiscard]] Complex operator()(const ModeVector& f, const ModeVector& g) const;
  // Smallest eigenvalue of the Hermitian part.
  [[nodiscard]] double positivity_margin() const;
  // max |W - P conj(W) P - i J|: P swaps k and -k, J is the canonical symplectic matrix.
  [[nodiscard]] double commutator_defect() const;

  // {K, t_ref, label, blocks: [[re, im] x 4] x (2K+1)} with diagonal blocks in row-major order.
  [[nodiscard]] nlohmann::json to_json() const;

 private:
  int k_;
  double t_ref_;
  std::string label_;
  Eigen::MatrixXcd w_;
};

// Ground state of the ultrastatic theory beta = a = 1 with mass m; DomainError unless m > 0.
TwoPointKernel ultrastatic_ground_state(double m, int K, double t_ref = 0.0);

// Ground state of the Hamiltonian of P frozen on the slice t, built on all Nx nodes and restricted to
// |k| <= K. It is the stationary ground state when the metric and V do not depend on t.
// DomainError unless beta a V > 0 on the slice.
TwoPointKernel static_ground_state(const WaveOperator& P, const Grid& grid, double t, int K);

// Sum over pairings i < j of products of two-point values (bosonic, no signs); 0 for odd n.
Complex quasifree_n_point(const TwoPointKernel& w, std::span<const ModeVector> f);

// Linear map from canonical data of theory 0 at the t_minus level (modes |k| <= K0) to canonical
// data of theory 1 at the t_plus level (modes |k| <= K1), through the jet lift and S_chi transport.
Eigen::MatrixXcd pullback_transfer(const MollerMap& M, int K0, int K1);
// Inverse direction: theory 1 at t_plus (|k| <= K1) to theory 0 at t_minus (|k| <= K0).
Eigen::MatrixXcd pushforward_transfer(const MollerMap& M, int K1, int K0);
// Pointwise identification at the t_minus level without evolution.
Eigen::MatrixXcd identification_transfer(const MollerMap& M, int K0, int K1);

// w0(xi, xi') = w1(R xi, R xi') on the t_minus slice of theory 0.
TwoPointKernel pullback_state(const TwoPointKernel& w1, const MollerMap& M, int K0);
// w1(xi, xi') = w0(R^{-1} xi, R^{-1} xi') on the t_plus slice of theory 1.
TwoPointKernel pushforward_state(const TwoPointKernel& w0, const MollerMap& M, int K1);
// w1 composed with the pointwise identification; reference for the smoothness proxy.
TwoPointKernel identification_state(const TwoPointKernel& w1, const MollerMap& M, int K0);

inline constexpr int kMinProxyModes = 16;

// Mode-decay proxy for a smooth difference of two kernels (not a wavefront-set computation).
struct DecayReport {
  int K = 0;
  std::vector<double> d;  // d[k] for k = 0..K
  double slope = 0.0;     // least-squares slope of log d_k against log k over K/4 <= k <= K
  double sup_q2 = 0.0;    // sup_k d_k k^2
  double sup_q4 = 0.0;
  bool identical = false;
  bool pass = false;      // slope < -1 or identical
};

// Per-mode Frobenius norm of the difference block with the uu entry weighted by <k>^{-2};
// d_k is the larger of the +k and -k values. ConfigError if K < 16 or the cutoffs differ.
DecayReport smoothness_proxy(const TwoPointKernel& a, const TwoPointKernel& b);

// Max entry difference of the kernel matrices (same K).
double kernel_distance(const TwoPointKernel& a, const TwoPointKernel& b);

}  // namespace mollerlab
