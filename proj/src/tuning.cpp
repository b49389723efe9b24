#include "svam/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>

namespace svam::tuning {

std::vector<double> TuneGrid::default_beta1() {
  std::vector<double> out;
  for (int k = 0; k < 7; ++k) out.push_back(std::pow(10.0, -3.0 + 4.0 * k / 6.0));
  return out;
}

void TuneGrid::validate() const {
  if (beta1.empty() || xi.empty() || alpha_trim.empty()) {
    throw ParameterError("tuning grid lists must be nonempty");
  }
  for (const double b : beta1) {
    if (!(b > 0.0)) throw ParameterError("beta1 candidates must be > 0");
  }
  for (const double x : xi) {
    if (!(x > 1.0)) throw ParameterError("xi candidates must be > 1");
  }
  for (const double a : alpha_trim) {
    if (!(a >= 0.0 && a <= 0.5)) throw ParameterError("alpha_trim candidates must lie in [0, 0.5]");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ParameterError("validation fraction must lie in (0, 1)");
  }
}

Vector prediction_errors(const Vector& model, const Dataset& data, Task task, double gamma_phi) {
  if (model.size() != data.d()) throw ParameterError("model dimension does not match data");
  const Index m = data.n();
  Vector err(m);
  if (task == Task::me) {
    return (data.X.rowwise() - model.transpose()).rowwise().squaredNorm();
  }
  if (data.y.size() != m) throw ParameterError("task needs one label per sample");
  const Vector eta = data.X * model;
  for (Index i = 0; i < m; ++i) {
    const double y = data.y(i);
    switch (task) {
      case Task::rr:
        err(i) = (y - eta(i)) * (y - eta(i));
        break;
      case Task::lr: {
        const double z = -y * eta(i);
        err(i) = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        break;
      }
      case Task::gamma:
        err(i) = y * std::exp(eta(i)) / (1.0 - gamma_phi) - eta(i);
        break;
      case Task::me:
        break;
    }
  }
  return err;
}

double trimmed_mean(const Vector& errors, double alpha_trim) {
  if (!(alpha_trim >= 0.0 && alpha_trim < 1.0)) {
    throw ParameterError("alpha_trim must lie in [0, 1)");
  }
  const Index m = errors.size();
  const Index drop = static_cast<Index>(std::ceil(alpha_trim * static_cast<double>(m) - 1e-9));
  const Index keep = m - std::min(drop, m);
  if (keep < 1) throw ParameterError("trimming leaves no validation points");
  std::vector<double> v(errors.data(), errors.data() + m);
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (Index i = 0; i < keep; ++i) sum += v[static_cast<std::size_t>(i)];
  return sum / static_cast<double>(keep);
}

double trimmed_validation_error(const Vector& model, const Dataset& val, Task task,
                                double alpha_trim, double gamma_phi) {
  return trimmed_mean(prediction_errors(model, val, task, gamma_phi), alpha_trim);
}

Split split_rows(Index n, double validation_fraction, std::uint64_t seed) {
  if (n < 2) throw ParameterError("need at least two samples to split");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ParameterError("validation fraction must lie in (0, 1)");
  }
  const Index m = std::clamp<Index>(
      static_cast<Index>(std::llround(validation_fraction * static_cast<double>(n))), 1, n - 1);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<Index> pick(0, i);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
  }
  Split split;
  split.validation.assign(perm.begin(), perm.begin() + m);
  split.train.assign(perm.begin() + m, perm.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

TuneResult tune(const Dataset& data, Task task, const TuneGrid& grid, std::uint64_t seed,
                const SvamConfig& base) {
  grid.validate();
  const Split split = split_rows(data.n(), grid.validation_fraction, seed);
  const Dataset train = data.subset(split.train);
  const Dataset val = data.subset(split.validation);

  const std::size_t nb = grid.beta1.size();
  const std::size_t nx = grid.xi.size();
  const std::size_t na = grid.alpha_trim.size();
  std::vector<std::optional<Vector>> models(nb * nx);
  std::vector<std::string> failures(nb * nx);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(nb * nx); ++k) {
    SvamConfig cfg = base;
    cfg.beta1 = grid.beta1[static_cast<std::size_t>(k) / nx];
    cfg.xi = grid.xi[static_cast<std::size_t>(k) % nx];
    cfg.beta_cap = std::max(cfg.beta_cap, cfg.beta1);
    // Chunked kernels fold in a fixed order, so a nested region that runs
    // single-threaded gives the same bits as a top-level run.
    try {
      RunTrace run = run_svam(train, task, cfg);
      if (run.final_model.allFinite()) {
        models[static_cast<std::size_t>(k)] = std::move(run.final_model);
      } else {
        failures[static_cast<std::size_t>(k)] = "non-finite model";
      }
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(k)] = e.what();
    }
  }

  TuneResult result;
  result.val_error = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t x = 0; x < nx; ++x) {
      const auto& model = models[b * nx + x];
      Vector errors;
      if (model) errors = prediction_errors(*model, val, task, base.gamma_phi);
      for (std::size_t a = 0; a < na; ++a) {
        ScoreRow row{grid.beta1[b], grid.xi[x], grid.alpha_trim[a],
                     std::numeric_limits<double>::infinity(), false};
        if (model) {
          row.val_error = trimmed_mean(errors, row.alpha_trim);
          row.converged = std::isfinite(row.val_error);
        }
        result.table.push_back(row);
        if (!row.converged) continue;
        const auto key = std::make_tuple(row.val_error, row.beta1, row.xi, row.alpha_trim);
        const auto best = std::make_tuple(result.val_error, result.beta1, result.xi,
                                          result.alpha_trim);
        if (!found || key < best) {
          found = true;
          result.beta1 = row.beta1;
          result.xi = row.xi;
          result.alpha_trim = row.alpha_trim;
          result.val_error = row.val_error;
          result.model = *model;
        }
      }
    }
  }
  if (!found) {
    std::ostringstream msg;
    msg << "tuning failed at every grid point";
    for (std::size_t k = 0; k < failures.size(); ++k) {
      if (!failures[k].empty()) {
        msg << "; beta1=" << grid.beta1[k / nx] << " xi=" << grid.xi[k % nx] << ": "
            << failures[k];
        break;
      }
    }
    throw Error(msg.str());
  }
  return result;
}

void write_score_table(std::ostream& out, const std::vector<ScoreRow>& table) {
  out << "beta1,xi,alpha_trim,val_error,converged\n";
  char buf[160];
  for (const auto& row : table) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d\n", row.beta1, row.xi,
                  row.alpha_trim, row.val_error, row.converged ? 1 : 0);
    out << buf;
  }
}

}  // namespace svam::tuning
