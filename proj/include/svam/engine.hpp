#pragma once

// The SVAM outer loop. Each iteration computes variance-altered weights at
// the current scale beta_t and model w_t, solves the weighted MLE for
// w_{t+1}, and sets beta_{t+1} = xi * beta_t.

#include "svam/data_gen.hpp"
#include "svam/kernels.hpp"
#include "svam/types.hpp"

#include <optional>
#include <vector>

namespace svam {

struct SvamConfig {
  double beta1 = 0.1;
  /// xi = 1 gives the fixed-scale VAM variant.
  double xi = 10.0;
  /// Upper bound on the number of trace records (the initial model counts).
  int max_iters = 50;
  double beta_cap = 1e12;
  /// Starting model; zero when unset.
  std::optional<Vector> init_model;
  ToleranceSpec solver_tol;
  /// Stop once consecutive models are closer than this.
  double model_change_tol = 1e-14;
  /// Gamma shape parameter used by the gamma task.
  double gamma_phi = 0.5;
  /// Ridge added to the logistic solve; keeps separable problems bounded.
  double lr_ridge = 1e-8;
  kernels::Exec exec = kernels::Exec::parallel;

  void validate() const;
};

struct IterationRecord {
  /// 1-based; record t holds beta_t and w_t.
  int t = 1;
  double beta = 0.0;
  Vector model;
  /// Cumulative wall-clock time since the run started.
  double wall_ms = 0.0;
  /// Distance to the ground truth (model_error) when one is known.
  std::optional<double> dist;
  /// beta_t dist^2, or beta_t (exp(dist) - 1)^2 for gamma.
  std::optional<double> invariant;
  /// Weights at this record's model were all zero; no solve followed.
  bool degenerate = false;
  /// The solve producing this model needed a jittered retry.
  bool retried = false;
};

enum class Termination { max_iters, beta_cap, degenerate_weights, model_converged };
std::string_view to_string(Termination reason);

struct RunTrace {
  std::vector<IterationRecord> records;
  Vector final_model;
  Termination reason = Termination::max_iters;
  /// Record indices t where the invariant fails after having held before.
  std::vector<int> invariant_violations;

  /// Number of weighted solves performed.
  int iterations() const noexcept { return static_cast<int>(records.size()) - 1; }
  std::optional<double> final_dist() const;
};

/// Runs SVAM on `data`. Ground-truth distances are recorded when
/// data.w_true is set. Solver errors propagate tagged with the iteration.
RunTrace run_svam(const Dataset& data, Task task, const SvamConfig& config);

RunTrace svam_rr(const Dataset& data, const SvamConfig& config);
RunTrace svam_me(const Dataset& data, const SvamConfig& config);
/// Requires config.beta1 >= 1.
RunTrace svam_gamma(const Dataset& data, const SvamConfig& config);
RunTrace svam_lr(const Dataset& data, const SvamConfig& config);

/// Weights s_i that run_svam uses at (model, beta). Gamma weights are
/// scaled so the largest is 1.
Vector svam_weights(const Dataset& data, Task task, const Vector& model, double beta,
                    double gamma_phi = 0.5, kernels::Exec exec = kernels::Exec::parallel);

/// Checks that the labels suit the task (lr: +-1, gamma: positive).
void validate_labels(const Dataset& data, Task task);

}  // namespace svam
