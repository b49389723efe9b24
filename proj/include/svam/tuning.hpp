#pragma once

// Hyperparameter selection for (beta1, xi, alpha_trim) by trimmed error on
// a held-out split.

#include "svam/data_gen.hpp"
#include "svam/engine.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace svam::tuning {

struct TuneGrid {
  std::vector<double> beta1 = default_beta1();
  std::vector<double> xi = {1.1, 1.3, 1.5, 2.0, 3.0};
  std::vector<double> alpha_trim = {0.0, 0.1, 0.2, 0.3, 0.4};
  double validation_fraction = 0.2;

  /// Seven log-spaced points from 1e-3 to 10.
  static std::vector<double> default_beta1();
  void validate() const;
};

/// Per-sample prediction error of `model`: squared residual (rr), logistic
/// loss (lr), gamma loss (gamma), squared distance (me).
Vector prediction_errors(const Vector& model, const Dataset& data, Task task,
                         double gamma_phi = 0.5);

/// Mean of the errors after dropping the ceil(alpha_trim m) largest.
double trimmed_mean(const Vector& errors, double alpha_trim);

double trimmed_validation_error(const Vector& model, const Dataset& val, Task task,
                                double alpha_trim, double gamma_phi = 0.5);

struct ScoreRow {
  double beta1 = 0.0;
  double xi = 0.0;
  double alpha_trim = 0.0;
  double val_error = 0.0;
  bool converged = false;
};

struct TuneResult {
  double beta1 = 0.0;
  double xi = 0.0;
  double alpha_trim = 0.0;
  double val_error = 0.0;
  /// Model trained with the chosen (beta1, xi).
  Vector model;
  /// One row per grid point, in grid order (beta1, then xi, then alpha_trim).
  std::vector<ScoreRow> table;
};

struct Split {
  std::vector<Index> train;
  std::vector<Index> validation;
};

/// Seeded random partition; validation gets round(fraction n) rows, at least
/// one, and train keeps at least one.
Split split_rows(Index n, double validation_fraction, std::uint64_t seed);

/// Trains on the train split for every (beta1, xi) and scores each
/// alpha_trim on the validation split. `base` supplies the other engine
/// settings. Ties go to the smaller beta1, then the smaller xi, then the
/// smaller alpha_trim. Throws Error if every grid point fails.
TuneResult tune(const Dataset& data, Task task, const TuneGrid& grid, std::uint64_t seed,
                const SvamConfig& base = {});

/// Columns beta1,xi,alpha_trim,val_error,converged.
void write_score_table(std::ostream& out, const std::vector<ScoreRow>& table);

}  // namespace svam::tuning
