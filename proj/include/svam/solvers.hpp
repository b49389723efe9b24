#pragma once

// Weighted maximum-likelihood solvers: the inner argmin of every SVAM
// iteration, one per task.

#include "svam/kernels.hpp"
#include "svam/types.hpp"

namespace svam::solvers {

/// Systems whose condition estimate exceeds this are reported as singular.
inline constexpr double kMaxCondition = 1e12;

/// Ratio of extreme eigenvalues of a symmetric PSD matrix; +inf when the
/// smallest eigenvalue is not positive.
double condition_estimate(const Matrix& spd);

struct LeastSquaresOptions {
  /// Added to the diagonal of X^T S X before solving.
  double diagonal_jitter = 0.0;
  /// Skip the condition check (used for the jittered retry).
  bool check_condition = true;
  kernels::Exec exec = kernels::Exec::parallel;
};

/// argmin_w sum_i s_i (y_i - <w, x_i>)^2 via a dense Cholesky solve of
/// (X^T S X) w = X^T S y.
/// Throws SingularSystemError carrying the condition estimate when the
/// weighted Gram matrix is numerically singular.
Vector weighted_least_squares(const Matrix& X, const Vector& y, const Vector& s,
                              const LeastSquaresOptions& options = {});

/// sum_i s_i p_i / sum_i s_i. Throws DegenerateWeightsError if the weights
/// sum to zero.
Vector weighted_mean(const Matrix& points, const Vector& s,
                     kernels::Exec exec = kernels::Exec::parallel);

/// Minimises sum_i s_i log(1 + exp(-y_i <x_i, w>)) + tol.ridge ||w||^2 with
/// damped Newton and Armijo backtracking, starting from `init`.
/// Converged once ||grad|| <= tol.grad_norm * max(1, sum_i s_i). Throws
/// NonConvergenceError if that is not met within tol.max_iters Newton steps.
Vector weighted_logistic_mle(const Matrix& X, const Vector& y, const Vector& s,
                             const Vector& init, const ToleranceSpec& tol = {},
                             kernels::Exec exec = kernels::Exec::parallel);

/// Minimises sum_i s_i [ (1 - phi)^-1 y_i exp(<x_i, w>) - <x_i, w> ]. Steps
/// whose objective overflows are rejected and halved.
Vector weighted_gamma_mle(const Matrix& X, const Vector& y, const Vector& s, double phi,
                          const Vector& init, const ToleranceSpec& tol = {},
                          kernels::Exec exec = kernels::Exec::parallel);

}  // namespace svam::solvers
