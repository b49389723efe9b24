#include "svam/baselines.hpp"

#include "svam/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace svam::baselines {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median_of(std::vector<double> v) {
  const std::size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

void require_labels(const Dataset& data) {
  if (data.n() < 1 || data.y.size() != data.n()) {
    throw ParameterError("regression baseline needs one label per sample");
  }
}

Vector unit_fit(const Dataset& data, Task task, const MleOptions& options) {
  validate_labels(data, task);
  const Vector ones = Vector::Ones(data.n());
  switch (task) {
    case Task::rr: {
      solvers::LeastSquaresOptions ls;
      ls.exec = options.exec;
      return solvers::weighted_least_squares(data.X, data.y, ones, ls);
    }
    case Task::me:
      return solvers::weighted_mean(data.X, ones, options.exec);
    case Task::lr: {
      ToleranceSpec tol = options.tol;
      tol.ridge = options.lr_ridge;
      return solvers::weighted_logistic_mle(data.X, data.y, ones, Vector::Zero(data.d()), tol,
                                            options.exec);
    }
    case Task::gamma:
      return solvers::weighted_gamma_mle(data.X, data.y, ones, options.gamma_phi,
                                         Vector::Zero(data.d()), options.tol, options.exec);
  }
  throw ParameterError("unknown task");
}

}  // namespace

BaselineResult vam(const Dataset& data, Task task, double beta_fixed, int max_iters,
                   SvamConfig base) {
  if (!(beta_fixed > 0.0)) throw ParameterError("VAM scale must be > 0");
  base.beta1 = beta_fixed;
  base.xi = 1.0;
  base.max_iters = max_iters;
  base.beta_cap = std::max(base.beta_cap, beta_fixed);
  BaselineResult out;
  out.method = "vam";
  RunTrace run = run_svam(data, task, base);
  out.model = run.final_model;
  out.wall_ms = run.records.back().wall_ms;
  out.iterations = run.iterations();
  out.converged = run.reason == Termination::model_converged;
  for (std::size_t k = 1; k < run.records.size(); ++k) out.trace.push_back(run.records[k].model);
  out.run = std::move(run);
  return out;
}

BaselineResult mle_all(const Dataset& data, Task task, const MleOptions& options) {
  const auto start = Clock::now();
  BaselineResult out;
  out.method = "mle";
  out.model = unit_fit(data, task, options);
  out.iterations = 1;
  out.wall_ms = ms_since(start);
  return out;
}

BaselineResult oracle(const Dataset& data, Task task, const MleOptions& options) {
  if (!data.corrupted_mask) throw ParameterError("oracle needs the corruption mask");
  const auto start = Clock::now();
  BaselineResult out;
  out.method = "oracle";
  out.model = unit_fit(data.clean_subset(), task, options);
  out.iterations = 1;
  out.wall_ms = ms_since(start);
  return out;
}

BaselineResult torrent(const Dataset& data, double alpha_hint, int max_iters, double tol) {
  require_labels(data);
  if (!(alpha_hint >= 0.0 && alpha_hint < 1.0)) {
    throw ParameterError("alpha_hint must lie in [0, 1)");
  }
  if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
  const auto start = Clock::now();
  const Index n = data.n();
  AdversarySpec hint;
  hint.alpha = alpha_hint;
  const Index keep = n - hint.corrupted_count(n);

  BaselineResult out;
  out.method = "torrent";
  out.converged = false;
  Vector w = Vector::Zero(data.d());
  std::vector<Index> active;
  for (int it = 0; it < max_iters; ++it) {
    const Vector r = (data.y - data.X * w).cwiseAbs();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return r(a) < r(b); });
    order.resize(static_cast<std::size_t>(keep));
    std::sort(order.begin(), order.end());
    if (order == active) {
      out.converged = true;
      break;
    }
    active = std::move(order);
    Vector s = Vector::Zero(n);
    for (const Index i : active) s(i) = 1.0;
    const Vector next = solvers::weighted_least_squares(data.X, data.y, s);
    const double change = (next - w).norm();
    w = next;
    out.trace.push_back(w);
    ++out.iterations;
    if (change <= tol) {
      out.converged = true;
      break;
    }
  }
  out.model = w;
  out.wall_ms = ms_since(start);
  return out;
}

double bisquare_weight(double r, double c, double scale) {
  const double u = r / (c * scale);
  if (!(std::abs(u) < 1.0)) return 0.0;
  const double v = 1.0 - u * u;
  return v * v;
}

BaselineResult tukey_bisquare(const Dataset& data, double c, int max_iters, double tol) {
  require_labels(data);
  if (!(c > 0.0)) throw ParameterError("bisquare tuning constant must be > 0");
  if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
  const auto start = Clock::now();
  const Index n = data.n();
  BaselineResult out;
  out.method = "tukey";
  out.converged = false;
  Vector w = solvers::weighted_least_squares(data.X, data.y, Vector::Ones(n));
  const double y_scale = 1.0 + data.y.cwiseAbs().maxCoeff();
  for (int it = 0; it < max_iters; ++it) {
    const Vector r = data.y - data.X * w;
    const double med = median_of(std::vector<double>(r.data(), r.data() + n));
    std::vector<double> dev(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) dev[static_cast<std::size_t>(i)] = std::abs(r(i) - med);
    const double scale = median_of(std::move(dev)) / 0.6745;
    if (scale <= 1e-14 * y_scale) {
      // More than half the residuals are already zero.
      out.converged = true;
      break;
    }
    Vector s(n);
    for (Index i = 0; i < n; ++i) s(i) = bisquare_weight(r(i), c, scale);
    if (!(s.maxCoeff() > 0.0)) throw DegenerateWeightsError("all bisquare weights are zero");
    solvers::LeastSquaresOptions ls;
    ls.check_condition = false;
    const Vector next = solvers::weighted_least_squares(data.X, data.y, s, ls);
    const double change = (next - w).norm();
    w = next;
    out.trace.push_back(w);
    ++out.iterations;
    if (change <= tol * (1.0 + w.norm())) {
      out.converged = true;
      break;
    }
  }
  out.model = w;
  out.wall_ms = ms_since(start);
  return out;
}

Vector coordinate_median(const Matrix& points) {
  if (points.rows() < 1) throw ParameterError("median of an empty point set");
  Vector m(points.cols());
  for (Index j = 0; j < points.cols(); ++j) {
    const auto col = points.col(j);
    m(j) = median_of(std::vector<double>(col.data(), col.data() + col.size()));
  }
  return m;
}

double sum_of_distances(const Matrix& points, const Vector& m) {
  return (points.rowwise() - m.transpose()).rowwise().norm().sum();
}

GeometricMedian geometric_median(const Matrix& points, double tol, int max_iters) {
  if (points.rows() < 1) throw ParameterError("median of an empty point set");
  if (!(tol > 0.0)) throw ParameterError("tolerance must be > 0");
  GeometricMedian out;
  Vector m = points.colwise().mean().transpose();
  out.objective.push_back(sum_of_distances(points, m));
  for (int it = 0; it < max_iters; ++it) {
    Vector num = Vector::Zero(points.cols());
    Vector pull = Vector::Zero(points.cols());
    double den = 0.0;
    int coincident = 0;
    for (Index i = 0; i < points.rows(); ++i) {
      const Vector diff = points.row(i).transpose() - m;
      const double dist = diff.norm();
      if (dist == 0.0) {
        ++coincident;
        continue;
      }
      num += points.row(i).transpose() / dist;
      pull += diff / dist;
      den += 1.0 / dist;
    }
    const double r = pull.norm();
    if (den == 0.0 || r <= static_cast<double>(coincident)) {
      // m is a data point whose multiplicity outweighs the pull of the rest.
      out.converged = true;
      break;
    }
    const Vector t = num / den;
    Vector next = t;
    if (coincident > 0) {
      const double gamma = std::min(1.0, coincident / r);
      next = (1.0 - gamma) * t + gamma * m;
    }
    const double step = (next - m).norm();
    m = std::move(next);
    out.objective.push_back(sum_of_distances(points, m));
    ++out.iterations;
    if (step <= tol) {
      out.converged = true;
      break;
    }
  }
  out.median = m;
  return out;
}

BaselineResult coordinate_median(const Dataset& data) {
  const auto start = Clock::now();
  BaselineResult out;
  out.method = "coord_median";
  out.model = coordinate_median(data.X);
  out.iterations = 1;
  out.wall_ms = ms_since(start);
  return out;
}

BaselineResult geometric_median(const Dataset& data, double tol) {
  const auto start = Clock::now();
  GeometricMedian gm = geometric_median(data.X, tol);
  BaselineResult out;
  out.method = "geo_median";
  out.model = gm.median;
  out.iterations = gm.iterations;
  out.converged = gm.converged;
  out.wall_ms = ms_since(start);
  return out;
}

}  // namespace svam::baselines
