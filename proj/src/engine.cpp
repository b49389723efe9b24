#include "svam/engine.hpp"

#include "svam/glm_likelihood.hpp"
#include "svam/solvers.hpp"

#include <chrono>
#include <cmath>

namespace svam {

void SvamConfig::validate() const {
  if (!(beta1 > 0.0) || !std::isfinite(beta1)) throw ParameterError("beta1 must be > 0");
  if (!(xi >= 1.0) || !std::isfinite(xi)) throw ParameterError("xi must be >= 1");
  if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
  if (!(beta_cap >= beta1)) throw ParameterError("beta_cap must be >= beta1");
  if (!(model_change_tol >= 0.0)) throw ParameterError("model_change_tol must be >= 0");
  if (!(lr_ridge >= 0.0)) throw ParameterError("lr_ridge must be >= 0");
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::max_iters: return "max_iters";
    case Termination::beta_cap: return "beta_cap";
    case Termination::degenerate_weights: return "degenerate_weights";
    case Termination::model_converged: return "model_converged";
  }
  return "?";
}

std::optional<double> RunTrace::final_dist() const {
  if (records.empty()) return std::nullopt;
  return records.back().dist;
}

void validate_labels(const Dataset& data, Task task) {
  if (data.n() < 1 || data.d() < 1) throw ParameterError("dataset is empty");
  if (!data.X.allFinite()) throw DomainError("covariates must be finite");
  if (task == Task::me) return;
  if (data.y.size() != data.n()) throw ParameterError("task needs one label per sample");
  for (Index i = 0; i < data.n(); ++i) {
    const double y = data.y(i);
    if (!std::isfinite(y)) throw DomainError("labels must be finite");
    if (task == Task::lr && y != 1.0 && y != -1.0) {
      throw DomainError("lr labels must be -1 or +1");
    }
    if (task == Task::gamma && !(y > 0.0)) throw DomainError("gamma labels must be positive");
  }
}

Vector svam_weights(const Dataset& data, Task task, const Vector& model, double beta,
                    double gamma_phi, kernels::Exec exec) {
  switch (task) {
    case Task::rr: return kernels::gaussian_weights(data.X, data.y, model, beta, exec);
    case Task::me: return kernels::point_weights(data.X, model, beta, exec);
    case Task::lr: return kernels::bernoulli_weights(data.X, data.y, model, beta, exec);
    case Task::gamma:
      return kernels::gamma_weights(data.X, data.y, model, gamma_phi, beta, exec);
  }
  throw ParameterError("unknown task");
}

namespace {

struct SolveResult {
  Vector model;
  bool retried = false;
};

SolveResult solve_weighted(const Dataset& data, Task task, const Vector& s, const Vector& warm,
                           const SvamConfig& config) {
  switch (task) {
    case Task::rr: {
      solvers::LeastSquaresOptions opts;
      opts.exec = config.exec;
      try {
        return {solvers::weighted_least_squares(data.X, data.y, s, opts), false};
      } catch (const SingularSystemError&) {
        const double trace = (data.X.rowwise().squaredNorm().transpose() * s)(0);
        opts.diagonal_jitter = 1e-10 * trace / static_cast<double>(data.d());
        opts.check_condition = false;
        return {solvers::weighted_least_squares(data.X, data.y, s, opts), true};
      }
    }
    case Task::me:
      return {solvers::weighted_mean(data.X, s, config.exec), false};
    case Task::lr: {
      ToleranceSpec tol = config.solver_tol;
      tol.ridge = config.lr_ridge;
      return {solvers::weighted_logistic_mle(data.X, data.y, s, warm, tol, config.exec), false};
    }
    case Task::gamma:
      return {solvers::weighted_gamma_mle(data.X, data.y, s, config.gamma_phi, warm,
                                          config.solver_tol, config.exec),
              false};
  }
  throw ParameterError("unknown task");
}

void annotate(IterationRecord& rec, const Dataset& data, Task task) {
  if (!data.w_true) return;
  const double dist = model_error(task, rec.model, *data.w_true);
  rec.dist = dist;
  if (task == Task::gamma) {
    const double e = std::expm1(dist);
    rec.invariant = rec.beta * e * e;
  } else {
    rec.invariant = rec.beta * dist * dist;
  }
}

}  // namespace

RunTrace run_svam(const Dataset& data, Task task, const SvamConfig& config) {
  config.validate();
  validate_labels(data, task);
  if (task == Task::gamma) FamilySpec::gamma(config.gamma_phi).validate();
  const Index d = data.d();
  Vector model = config.init_model.value_or(Vector::Zero(d));
  if (model.size() != d) throw ParameterError("init_model dimension does not match data");
  if (data.w_true && data.w_true->size() != d) {
    throw ParameterError("w_true dimension does not match data");
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };

  RunTrace trace;
  double beta = config.beta1;
  {
    IterationRecord first;
    first.t = 1;
    first.beta = beta;
    first.model = model;
    annotate(first, data, task);
    first.wall_ms = elapsed_ms();
    trace.records.push_back(std::move(first));
  }

  trace.reason = Termination::max_iters;
  while (static_cast<int>(trace.records.size()) < config.max_iters) {
    const int t = static_cast<int>(trace.records.size());
    if (beta > config.beta_cap) {
      trace.reason = Termination::beta_cap;
      break;
    }
    SolveResult next;
    try {
      const Vector s = svam_weights(data, task, model, beta, config.gamma_phi, config.exec);
      if (!(s.maxCoeff() > 0.0)) {
        trace.records.back().degenerate = true;
        trace.reason = Termination::degenerate_weights;
        break;
      }
      next = solve_weighted(data, task, s, model, config);
    } catch (Error& e) {
      e.set_iteration(t);
      throw;
    }

    const double change = (next.model - model).norm();
    beta *= config.xi;
    model = std::move(next.model);

    IterationRecord rec;
    rec.t = t + 1;
    rec.beta = beta;
    rec.model = model;
    rec.retried = next.retried;
    annotate(rec, data, task);
    rec.wall_ms = elapsed_ms();
    trace.records.push_back(std::move(rec));

    if (change < config.model_change_tol) {
      trace.reason = Termination::model_converged;
      break;
    }
  }

  bool held = false;
  for (const auto& rec : trace.records) {
    if (!rec.invariant) break;
    if (*rec.invariant <= 1.0) {
      held = true;
    } else if (held) {
      trace.invariant_violations.push_back(rec.t);
    }
  }
  trace.final_model = model;
  return trace;
}

RunTrace svam_rr(const Dataset& data, const SvamConfig& config) {
  return run_svam(data, Task::rr, config);
}

RunTrace svam_me(const Dataset& data, const SvamConfig& config) {
  return run_svam(data, Task::me, config);
}

RunTrace svam_gamma(const Dataset& data, const SvamConfig& config) {
  if (!(config.beta1 >= 1.0)) throw ParameterError("gamma SVAM needs beta1 >= 1");
  return run_svam(data, Task::gamma, config);
}

RunTrace svam_lr(const Dataset& data, const SvamConfig& config) {
  return run_svam(data, Task::lr, config);
}

}  // namespace svam
