#pragma once

// Competitor estimators: fixed-scale VAM, unweighted MLE, the clean-data
// oracle, hard thresholding, Tukey's bisquare IRLS and two robust location
// estimators.

#include "svam/data_gen.hpp"
#include "svam/engine.hpp"
#include "svam/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace svam::baselines {

struct BaselineResult {
  std::string method;
  Vector model;
  /// Models after each iteration (iterative methods only).
  std::vector<Vector> trace;
  double wall_ms = 0.0;
  bool converged = true;
  int iterations = 0;
  /// Full SVAM trace for vam.
  std::optional<RunTrace> run;
};

/// run_svam with xi = 1 at scale beta_fixed. `base` supplies every other
/// engine setting.
BaselineResult vam(const Dataset& data, Task task, double beta_fixed, int max_iters,
                   SvamConfig base = {});

struct MleOptions {
  double gamma_phi = 0.5;
  double lr_ridge = 1e-8;
  ToleranceSpec tol;
  kernels::Exec exec = kernels::Exec::parallel;
};

/// Unit-weight fit on every sample: OLS, sample mean, logistic or gamma MLE.
BaselineResult mle_all(const Dataset& data, Task task, const MleOptions& options = {});

/// mle_all restricted to rows outside the corruption mask. Throws
/// ParameterError when the dataset has no mask.
BaselineResult oracle(const Dataset& data, Task task, const MleOptions& options = {});

/// Hard thresholding: OLS on the active set, then keep the n - floor(a n)
/// samples with the smallest absolute residuals. Starts from w = 0 and stops
/// at an active-set fixed point, when the model moves less than tol, or after
/// max_iters refits.
BaselineResult torrent(const Dataset& data, double alpha_hint, int max_iters = 100,
                       double tol = 1e-12);

/// (1 - (r / (c scale))^2)^2 for |r| <= c scale, else 0.
double bisquare_weight(double r, double c, double scale);

/// Tukey bisquare IRLS from the OLS fit, scale = MAD / 0.6745 recomputed each
/// iteration. Throws DegenerateWeightsError if every weight vanishes.
BaselineResult tukey_bisquare(const Dataset& data, double c = 4.685, int max_iters = 100,
                              double tol = 1e-10);

/// Per-coordinate median; the lower middle value when n is even.
Vector coordinate_median(const Matrix& points);

struct GeometricMedian {
  Vector median;
  /// sum_i ||p_i - m|| at every iterate, starting with the initial point.
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
};

/// Weiszfeld iteration with the Vardi-Zhang modification for iterates that
/// land on a data point. Starts from the sample mean and stops when a step is
/// at most tol.
GeometricMedian geometric_median(const Matrix& points, double tol = 1e-10,
                                 int max_iters = 10000);

double sum_of_distances(const Matrix& points, const Vector& m);

BaselineResult coordinate_median(const Dataset& data);
BaselineResult geometric_median(const Dataset& data, double tol = 1e-10);

}  // namespace svam::baselines
