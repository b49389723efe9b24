#pragma once

// Randomised property checks shared by the unit tests and the acceptance
// binary. Each check is seeded and returns a verdict with a short detail
// string.

#include "svam/glm_likelihood.hpp"

#include <string>
#include <vector>

namespace props {

struct Verdict {
  std::string name;
  bool passed = true;
  std::string detail;
};

/// Likelihood ordering and the mode are unchanged by the scale.
Verdict order_and_mode_preservation(svam::FamilyKind family, int cases = 1000);
/// beta = 1 reproduces the standard density.
Verdict beta_one_identity(int cases = 1000);
/// Closed-form altered variances against Monte Carlo, 5% relative.
Verdict variance_monte_carlo();
/// Altered gamma mode (1 - phi~)/eta~ equals (1 - phi)/eta.
Verdict gamma_mode_identity(int cases = 1000);
/// Analytic gradients against central differences, 1e-5 relative.
Verdict gradients_vs_finite_differences();
/// Weighted LS, weighted mean and the Newton solvers against independent
/// minimisers on small instances, 1e-8.
Verdict solvers_vs_brute_force();
/// Scaling every weight by c > 0 leaves the weighted argmin unchanged.
Verdict weight_rescaling_invariance();
/// Leverage scores of full-rank X sum to d.
Verdict leverage_trace();
/// beta_t dist_t^2 <= 1 keeps holding on converged seeded rr runs.
Verdict invariant_on_converged_runs();
/// Identical configs give byte-identical results for 1 and 4 jobs.
Verdict deterministic_reruns();

std::vector<Verdict> run_all();

}  // namespace props
