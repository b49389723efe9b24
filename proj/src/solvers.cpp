#include "svam/solvers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace svam::solvers {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxHalvings = 60;

void check_weights(const Vector& s, Index n) {
  if (s.size() != n) {
    throw ParameterError("weight vector length does not match sample count");
  }
  bool any_positive = false;
  for (Index i = 0; i < n; ++i) {
    if (!std::isfinite(s(i)) || s(i) < 0.0) {
      throw DomainError("weights must be finite and nonnegative");
    }
    any_positive = any_positive || s(i) > 0.0;
  }
  if (!any_positive) {
    throw DegenerateWeightsError("all weights are zero");
  }
}

// Damped Newton with Armijo backtracking. `objective(w, with_hessian)`
// returns kernels::Derivatives.
template <class Objective>
Vector damped_newton(Objective objective, Vector w, const ToleranceSpec& tol, double mass,
                     const char* name) {
  if (!(tol.grad_norm > 0.0) || tol.max_iters < 1) {
    throw ParameterError("solver tolerance must be positive with at least one iteration");
  }
  const double target = tol.grad_norm * std::max(1.0, mass);
  double grad_norm = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= tol.max_iters; ++it) {
    const kernels::Derivatives D = objective(w, true);
    if (!std::isfinite(D.value)) {
      throw NonConvergenceError(std::string(name) + ": objective is not finite at the iterate",
                                grad_norm);
    }
    const Vector& g = D.gradient;
    grad_norm = g.norm();
    if (grad_norm <= target) {
      return w;
    }
    if (it == tol.max_iters) break;

    Vector p;
    bool newton = false;
    Eigen::LLT<Matrix> llt(D.hessian);
    if (llt.info() == Eigen::Success) {
      p = -llt.solve(g);
      newton = p.allFinite() && g.dot(p) < 0.0;
    }
    if (!newton) {
      p = -g;
    }

    // A Newton decrement below the objective's rounding level cannot be
    // verified by Armijo; the full step still improves the gradient.
    if (newton && -g.dot(p) <= 4.0 * kEps * (1.0 + std::abs(D.value))) {
      const Vector candidate = w + p;
      if (std::isfinite(objective(candidate, false).value)) {
        w = candidate;
        continue;
      }
    }

    auto line_search = [&](const Vector& dir, Vector& out) {
      const double slope = g.dot(dir);
      double t = 1.0;
      for (int k = 0; k < kMaxHalvings; ++k) {
        Vector candidate = w + t * dir;
        const double value = objective(candidate, false).value;
        if (std::isfinite(value) && value <= D.value + tol.armijo * t * slope) {
          out = std::move(candidate);
          return true;
        }
        t *= 0.5;
      }
      return false;
    };

    Vector next;
    bool moved = line_search(p, next);
    if (!moved && newton) {
      moved = line_search(-g, next);
    }
    if (!moved) {
      // No representable decrease: accept if stationary at machine precision.
      if (grad_norm <= 1e-8 * std::max(1.0, std::abs(D.value))) {
        return w;
      }
      break;
    }
    w = std::move(next);
  }
  std::ostringstream msg;
  msg << name << ": no convergence within " << tol.max_iters
      << " Newton steps (gradient norm " << grad_norm << ")";
  throw NonConvergenceError(msg.str(), grad_norm);
}

}  // namespace

double condition_estimate(const Matrix& spd) {
  if (spd.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(spd, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Vector weighted_least_squares(const Matrix& X, const Vector& y, const Vector& s,
                              const LeastSquaresOptions& options) {
  if (y.size() != X.rows()) {
    throw ParameterError("label vector length does not match sample count");
  }
  check_weights(s, X.rows());
  Matrix A = kernels::weighted_gram(X, s, options.exec);
  const Vector b = kernels::weighted_moment(X, s, y, options.exec);
  if (options.diagonal_jitter != 0.0) {
    A.diagonal().array() += options.diagonal_jitter;
  }
  if (options.check_condition) {
    const double cond = condition_estimate(A);
    if (!(cond <= kMaxCondition)) {
      std::ostringstream msg;
      msg << "weighted least squares: X^T S X is numerically singular (condition estimate "
          << cond << ")";
      throw SingularSystemError(msg.str(), cond);
    }
  }
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError("weighted least squares: Cholesky factorisation failed",
                              std::numeric_limits<double>::infinity());
  }
  return llt.solve(b);
}

Vector weighted_mean(const Matrix& points, const Vector& s, kernels::Exec exec) {
  check_weights(s, points.rows());
  return kernels::weighted_row_sum(points, s, exec) / s.sum();
}

Vector weighted_logistic_mle(const Matrix& X, const Vector& y, const Vector& s,
                             const Vector& init, const ToleranceSpec& tol,
                             kernels::Exec exec) {
  check_weights(s, X.rows());
  auto objective = [&](const Vector& w, bool hess) {
    return kernels::logistic_objective(X, y, s, w, tol.ridge, hess, exec);
  };
  return damped_newton(objective, init, tol, s.sum(), "weighted logistic MLE");
}

Vector weighted_gamma_mle(const Matrix& X, const Vector& y, const Vector& s, double phi,
                          const Vector& init, const ToleranceSpec& tol, kernels::Exec exec) {
  check_weights(s, X.rows());
  for (Index i = 0; i < y.size(); ++i) {
    if (!(y(i) > 0.0)) throw DomainError("gamma labels must be positive");
  }
  auto objective = [&](const Vector& w, bool hess) {
    return kernels::gamma_objective(X, y, s, w, phi, hess, exec);
  };
  return damped_newton(objective, init, tol, s.sum(), "weighted gamma MLE");
}

}  // namespace svam::solvers
