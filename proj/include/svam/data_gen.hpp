#pragma once

// Synthetic GLM data and adversarial label corruption.
//
// Clean data:
//   rr     y = <w*, x>                 (+ N(0, 1/beta*) noise in the hybrid model)
//   lr     y = +1 if <w*, x> > 0 else -1
//   gamma  y = (1 - phi) exp(-<w*, x>)  (mode of G(. | exp(<w*, x>), phi))
//   me     points ~ N(mu*, I/d), no labels
//
// Corruption picks k = floor(alpha n) locations and overwrites the labels
// (points, for me) there. Every stochastic step is driven by an explicit
// seed.

#include "svam/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace svam {

struct Dataset {
  Task task = Task::rr;
  /// Covariates (rows are samples); for mean estimation, the points.
  Matrix X;
  /// Labels; empty for mean estimation.
  Vector y;
  std::optional<Vector> w_true;
  /// 1 where the label (point) was corrupted.
  std::optional<std::vector<std::uint8_t>> corrupted_mask;
  std::optional<Vector> w_adv;
  /// "oblivious" for label-blind placements, "adaptive" otherwise.
  std::string placement = "oblivious";

  Index n() const noexcept { return X.rows(); }
  Index d() const noexcept { return X.cols(); }
  bool has_labels() const noexcept { return task != Task::me; }
  std::size_t corrupted_count() const;

  /// Rows where the mask is false. Throws ParameterError without a mask.
  Dataset clean_subset() const;
  /// Copy restricted to the given rows (mask and labels follow).
  Dataset subset(const std::vector<Index>& rows) const;
};

enum class CovariateDist { std_normal, unit_sphere };
enum class Location { random, magnitude, leverage };
enum class CorruptionKind { adversarial_model, sign_flip, constant, multiplicative };
enum class Awareness { oblivious, partially_adaptive, fully_adaptive };

std::string_view to_string(CovariateDist v);
std::string_view to_string(Location v);
std::string_view to_string(CorruptionKind v);
std::string_view to_string(Awareness v);
CovariateDist parse_covariate_dist(std::string_view s);
Location parse_location(std::string_view s);
CorruptionKind parse_corruption_kind(std::string_view s);
Awareness parse_awareness(std::string_view s);

struct AdversarySpec {
  double alpha = 0.0;
  Location location = Location::random;
  CorruptionKind kind = CorruptionKind::adversarial_model;
  /// Label written by CorruptionKind::constant (every coordinate, for me).
  double constant_value = 0.0;
  /// Multiplicative factors b_i are log-uniform on [mult_low, mult_high].
  double mult_low = 10.0;
  double mult_high = 1000.0;
  Awareness awareness = Awareness::partially_adaptive;

  void validate() const;
  /// k = floor(alpha n).
  Index corrupted_count(Index n) const;
};

/// splitmix64 of (seed, stream); independent sub-seeds for each stage.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Vector random_unit_vector(Index d, std::mt19937_64& rng);

Matrix gen_covariates(Index n, Index d, CovariateDist dist, std::uint64_t seed);

struct LabelOptions {
  /// Hybrid noise precision beta*; noise N(0, 1/beta*) on rr labels.
  std::optional<double> noise_beta_star;
  /// Gamma shape parameter; required for Task::gamma.
  std::optional<double> phi;
  std::uint64_t seed = 0;
};

Vector gen_labels(const Matrix& X, const Vector& w_true, Task task,
                  const LabelOptions& options = {});

/// Diagonal of the hat matrix X (X^T X)^+ X^T.
struct LeverageScores {
  Vector scores;
  bool rank_deficient = false;
};
LeverageScores leverage_scores(const Matrix& X);

/// Uniform k-subset of [0, n) without replacement. Never sees the data.
std::vector<Index> random_locations(Index n, Index k, std::uint64_t seed);

/// Locations for corruption, sorted ascending. Ties in the magnitude and
/// leverage rankings go to the lowest index.
std::vector<Index> choose_locations(const AdversarySpec& spec, const Matrix& X,
                                    const Vector& y, std::uint64_t seed);

/// Overwrites labels (points, for me) at the chosen locations and records the
/// mask and, for adversarial_model, the adversarial model.
Dataset corrupt(Dataset data, const AdversarySpec& spec, std::uint64_t seed, double phi = 0.5);

/// Everything needed to draw one benchmark problem.
struct ProblemSpec {
  Task task = Task::rr;
  Index n = 1000;
  Index d = 10;
  CovariateDist covariates = CovariateDist::std_normal;
  std::optional<double> noise_beta_star;
  double phi = 0.5;
  /// Norms of mu* and the adversarial mean for mean estimation.
  double mean_norm = 2.0;
  double adv_mean_norm = 6.0;
  AdversarySpec adversary;
};

/// Draws covariates, w*, clean labels and corruption from one seed.
Dataset make_problem(const ProblemSpec& spec, std::uint64_t seed);

/// Recovery error of an estimate. For lr the model scale is not identified,
/// so both vectors are normalised first.
double model_error(Task task, const Vector& estimate, const Vector& truth);

/// Angle (radians) between two nonzero vectors.
double angle_between(const Vector& a, const Vector& b);

}  // namespace svam
