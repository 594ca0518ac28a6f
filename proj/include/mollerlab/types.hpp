#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace mollerlab {

using Complex = std::complex<double>;

// Fiber dimension never exceeds 3 (Dirac: 2, reduced wave: 3), so matrices live on the stack.
inline constexpr int kMaxFiber = 3;
using FiberMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxFiber, kMaxFiber>;
using FiberVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxFiber, 1>;

using ScalarFn = std::function<double(double t, double x)>;

enum class FiberKind { real, complex };
enum class Direction { forward, backward };

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mollerlab
