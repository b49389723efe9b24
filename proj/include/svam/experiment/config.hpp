#pragma once

// Experiment configuration for the svam-bench harness. Configs are JSON; see
// README.md for the schema. Command-line flags override file values.

#include "svam/data_gen.hpp"
#include "svam/tuning.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace svam::experiment {

enum class InitKind { zero, adversarial, truth, given };

struct SvamSettings {
  double beta1 = 0.1;
  double xi = 10.0;
  int max_iters = 50;
  double beta_cap = 1e12;
  InitKind init = InitKind::zero;
  /// Used when init == given.
  std::vector<double> init_vector;
  /// Pick beta1 and xi per seed with tuning::tune.
  bool tune = false;
  double lr_ridge = 1e-8;
};

struct SweepSpec {
  /// One of alpha, dim, beta1, xi.
  std::string param = "alpha";
  std::vector<double> values;
};

struct GridInitSpec {
  /// "grid" (d = 2, points x points over [lo, hi]^2) or "random" (count
  /// uniform draws from [lo, hi]^d plus the origin, the adversarial model and w*).
  std::string mode = "grid";
  double lo = -5.0;
  double hi = 5.0;
  int points = 20;
  int count = 1000;
  double success_tol = 1e-6;
  int max_success_iters = 8;
};

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names{"svam",   "vam",   "mle",          "oracle",
                                              "torrent", "tukey", "coord_median", "geo_median"};
  return names;
}

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<std::string> methods{"svam"};
  std::vector<double> vam_betas{1.0};
  SvamSettings svam;
  tuning::TuneGrid tune_grid;
  std::uint64_t seed = 0;
  int num_seeds = 1;
  /// Explicit seed list; wins over seed/num_seeds when nonempty.
  std::vector<std::uint64_t> seed_list;
  int torrent_max_iters = 100;
  double tukey_c = 4.685;
  int tukey_max_iters = 100;
  SweepSpec sweep;
  GridInitSpec grid_init;
  std::string out = "results.csv";
  int jobs = 1;

  std::vector<std::uint64_t> seeds() const;
  /// Throws ParameterError.
  void validate() const;
};

/// Throws ParameterError on malformed JSON, unknown keys or bad values.
ExperimentConfig parse_config(std::string_view json_text);
/// Throws IoError if the file cannot be read, ParameterError if it is invalid.
ExperimentConfig load_config(const std::string& path);
std::string dump_config(const ExperimentConfig& config);

}  // namespace svam::experiment
