#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace svam {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Estimation task. Each task pairs a likelihood family with a weighted
/// MLE solver: rr (gaussian / least squares), me (multivariate gaussian /
/// weighted mean), gamma (gamma with log link), lr (bernoulli / logistic).
enum class Task { rr, me, gamma, lr };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

/// Base of every error raised by the library. Engine code tags errors with
/// the SVAM iteration in which they surfaced.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;

  int iteration() const noexcept { return iteration_; }
  void set_iteration(int t) noexcept { iteration_ = t; }

 private:
  int iteration_ = -1;
};

/// Non-finite input, or an input outside a family's support.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or an incompatible combination of options.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double grad_norm)
      : Error(what), grad_norm_(grad_norm) {}
  double gradient_norm() const noexcept { return grad_norm_; }

 private:
  double grad_norm_;
};

/// Every weight is zero (after underflow clamping), so no weighted
/// problem can be formed.
class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Inverse-variance knob of a variance-altered likelihood. Always > 0.
class Scale {
 public:
  explicit Scale(double beta);
  double value() const noexcept { return beta_; }

 private:
  double beta_;
};

/// Stopping rules for the iterative (Newton) inner solvers.
struct ToleranceSpec {
  double grad_norm = 1e-10;
  int max_iters = 100;
  double armijo = 1e-4;
  /// Coefficient of the ridge term ridge * ||w||^2 (logistic only).
  double ridge = 0.0;
};

}  // namespace svam
