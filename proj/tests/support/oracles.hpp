#pragma once

// Independent reference computations for tests. None of these call the
// library routine they are used to check.

#include "svam/types.hpp"

#include <functional>

namespace oracle {

using svam::Matrix;
using svam::Vector;

double normal_pdf(double y, double mean, double var);
double sigmoid(double z);

/// Householder QR solve of min || diag(sqrt(s)) (X w - y) ||.
Vector qr_weighted_least_squares(const Matrix& X, const Vector& y, const Vector& s);

/// Hat-matrix diagonal through an explicit inverse of X^T X.
Vector explicit_hat_diagonal(const Matrix& X);

/// Central differences with step h.
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                  double h = 1e-6);

/// Plain gradient descent with backtracking until ||grad|| <= tol.
Vector gradient_descent(const std::function<double(const Vector&)>& f,
                        const std::function<Vector(const Vector&)>& grad, Vector x,
                        double tol = 1e-10, int max_iters = 200000);

/// sum_i s_i log(1 + exp(-y_i <x_i, w>)), written directly.
double logistic_loss(const Matrix& X, const Vector& y, const Vector& s, const Vector& w);
Vector logistic_gradient(const Matrix& X, const Vector& y, const Vector& s, const Vector& w);

/// sum_i s_i [ y_i exp(<x_i, w>) / (1 - phi) - <x_i, w> ].
double gamma_loss(const Matrix& X, const Vector& y, const Vector& s, const Vector& w, double phi);
Vector gamma_gradient(const Matrix& X, const Vector& y, const Vector& s, const Vector& w,
                      double phi);

/// Minimiser of f over [lo, hi]^2 by repeated grid refinement.
Vector grid_minimize_2d(const std::function<double(const Vector&)>& f, double lo, double hi,
                        int rounds = 40, int points = 41);

}  // namespace oracle
