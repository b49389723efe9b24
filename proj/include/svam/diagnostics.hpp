#pragma once

// Simulation-only probes of the local weighted strong convexity (lambda) and
// local weighted Lipschitz (Lambda) quantities along an SVAM run. Every probe
// needs the ground truth.
//
// Objectives follow the solvers: 1/2 sum s_i (y_i - <w, x_i>)^2 for rr,
// 1/2 sum s_i ||p_i - mu||^2 for me, and the weighted logistic and gamma
// losses for lr and gamma.

#include "svam/data_gen.hpp"
#include "svam/engine.hpp"

#include <iosfwd>
#include <vector>

namespace svam::diagnostics {

/// Smallest eigenvalue of sum_i s_i x_i x_i^T, clamped at 0.
double lwsc_probe(const Matrix& X, const Vector& s);

/// Hessian of the weighted objective at w.
Matrix weighted_hessian(const Dataset& data, Task task, const Vector& s, const Vector& w,
                        double gamma_phi = 0.5);

/// Gradient of the weighted objective at w.
Vector weighted_gradient(const Dataset& data, Task task, const Vector& s, const Vector& w,
                         double gamma_phi = 0.5);

/// Weighted objective value at w.
double weighted_objective(const Dataset& data, Task task, const Vector& s, const Vector& w,
                          double gamma_phi = 0.5);

/// Smallest Hessian eigenvalue at w, clamped at 0.
double lwsc_probe(const Dataset& data, Task task, const Vector& s, const Vector& w,
                  double gamma_phi = 0.5);

/// ||grad Q(w_star)|| with weights taken at (w_current, beta), exactly as
/// run_svam computes them.
double lwlc_probe(const Dataset& data, Task task, const Vector& w_star, const Vector& w_current,
                  double beta, double gamma_phi = 0.5);

struct ContractionRow {
  /// Record index of the model the weights were computed from.
  int t = 0;
  double beta = 0.0;
  double lambda_min = 0.0;
  double grad_norm = 0.0;
  /// 2 Lambda / lambda; +inf when lambda is 0.
  double bound = 0.0;
  /// ||w_{t+1} - w*||.
  double observed = 0.0;
  bool lambda_zero = false;
  bool holds = true;
};

struct DiagnosticsReport {
  std::vector<ContractionRow> rows;
  /// Values of t whose row does not satisfy the bound.
  std::vector<int> violations;
  /// Copied from the trace.
  std::vector<int> invariant_violations;
};

/// Checks ||w_{t+1} - w*|| <= 2 Lambda_t / lambda_t + tol (1 + bound) for
/// every consecutive pair of records. For lr and gamma lambda is the smaller
/// of the Hessian minima at w* and at w_{t+1}. Throws ParameterError without
/// data.w_true.
DiagnosticsReport contraction_report(const RunTrace& trace, const Dataset& data, Task task,
                                     double gamma_phi = 0.5, double tol = 1e-9);

/// Columns t,beta,lambda_min,grad_norm,bound,observed,lambda_zero,holds.
void write_report_csv(std::ostream& out, const DiagnosticsReport& report);

}  // namespace svam::diagnostics
