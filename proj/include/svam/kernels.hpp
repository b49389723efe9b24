#pragma once

// Data-parallel inner loops of SVAM: per-point weights and weighted sums
// over the n samples.
//
// Every kernel has two implementations:
//
//   Exec::serial    plain per-row loops; the reference the parallel path is
//                   tested against.
//   Exec::parallel  OpenMP over fixed-size row chunks. Each chunk produces a
//                   partial result and the partials are added in chunk
//                   order, so the output is bitwise identical for any thread
//                   count.
//
// Samples are the rows of X (n x d).

#include "svam/types.hpp"

namespace svam::kernels {

enum class Exec { serial, parallel };

/// Rows per reduction chunk for the parallel kernels.
inline constexpr Index kChunkRows = 256;

// --- weights ---------------------------------------------------------------
// All weight kernels clamp values below kWeightFloor to zero.

/// s_i = exp(-beta/2 (y_i - <x_i, w>)^2).
Vector gaussian_weights(const Matrix& X, const Vector& y, const Vector& w, double beta,
                        Exec exec = Exec::parallel);

/// s_i = exp(-beta/2 ||p_i - mu||^2) for the rows p_i of `points`.
Vector point_weights(const Matrix& points, const Vector& mu, double beta,
                     Exec exec = Exec::parallel);

/// s_i = (1 + exp(-beta y_i <x_i, w>))^-1, y_i in {-1, +1}.
Vector bernoulli_weights(const Matrix& X, const Vector& y, const Vector& w, double beta,
                         Exec exec = Exec::parallel);

/// s_i = G(y_i | eta~_i, phi~) with eta_i = exp(<x_i, w>), divided by the
/// batch maximum. Computed in log space; the largest weight is exactly 1.
Vector gamma_weights(const Matrix& X, const Vector& y, const Vector& w, double phi,
                     double beta, Exec exec = Exec::parallel);

// --- weighted sums ---------------------------------------------------------

/// sum_i s_i x_i x_i^T (d x d).
Matrix weighted_gram(const Matrix& X, const Vector& s, Exec exec = Exec::parallel);

/// sum_i s_i y_i x_i.
Vector weighted_moment(const Matrix& X, const Vector& s, const Vector& y,
                       Exec exec = Exec::parallel);

/// sum_i s_i p_i.
Vector weighted_row_sum(const Matrix& points, const Vector& s, Exec exec = Exec::parallel);

/// Value, gradient and (optionally) Hessian of a weighted objective.
struct Derivatives {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;  // empty unless requested
};

/// sum_i s_i log(1 + exp(-y_i <x_i, w>)) + ridge ||w||^2.
Derivatives logistic_objective(const Matrix& X, const Vector& y, const Vector& s,
                               const Vector& w, double ridge, bool with_hessian,
                               Exec exec = Exec::parallel);

/// sum_i s_i [ (1 - phi)^-1 y_i exp(<x_i, w>) - <x_i, w> ].
/// The value is +inf if any exp overflows.
Derivatives gamma_objective(const Matrix& X, const Vector& y, const Vector& s,
                            const Vector& w, double phi, bool with_hessian,
                            Exec exec = Exec::parallel);

}  // namespace svam::kernels
