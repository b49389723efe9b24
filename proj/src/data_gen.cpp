#include "svam/data_gen.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace svam {

namespace {

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::pair<std::string_view, Enum>, N>& table,
                const char* what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw ParameterError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<std::string_view, CovariateDist>, 2> kCovariates{
    {{"std_normal", CovariateDist::std_normal}, {"unit_sphere", CovariateDist::unit_sphere}}};
constexpr std::array<std::pair<std::string_view, Location>, 3> kLocations{
    {{"random", Location::random},
     {"magnitude", Location::magnitude},
     {"leverage", Location::leverage}}};
constexpr std::array<std::pair<std::string_view, CorruptionKind>, 4> kKinds{
    {{"adversarial_model", CorruptionKind::adversarial_model},
     {"sign_flip", CorruptionKind::sign_flip},
     {"constant", CorruptionKind::constant},
     {"multiplicative", CorruptionKind::multiplicative}}};
constexpr std::array<std::pair<std::string_view, Awareness>, 3> kAwareness{
    {{"oblivious", Awareness::oblivious},
     {"partially_adaptive", Awareness::partially_adaptive},
     {"fully_adaptive", Awareness::fully_adaptive}}};

template <class Enum, std::size_t N>
std::string_view name_of(Enum v, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

// Indices of the k largest keys; ties go to the lower index.
std::vector<Index> top_k(const Vector& keys, Index k) {
  std::vector<Index> order(static_cast<std::size_t>(keys.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return keys(a) > keys(b); });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

void check_kind_for_task(CorruptionKind kind, Task task) {
  const bool ok = [&] {
    switch (kind) {
      case CorruptionKind::adversarial_model:
      case CorruptionKind::constant:
        return true;
      case CorruptionKind::sign_flip:
        return task != Task::gamma;
      case CorruptionKind::multiplicative:
        return task == Task::gamma;
    }
    return false;
  }();
  if (!ok) {
    throw ParameterError("corruption kind '" + std::string(to_string(kind)) +
                         "' is not valid for task '" + std::string(to_string(task)) + "'");
  }
}

}  // namespace

std::string_view to_string(CovariateDist v) { return name_of(v, kCovariates); }
std::string_view to_string(Location v) { return name_of(v, kLocations); }
std::string_view to_string(CorruptionKind v) { return name_of(v, kKinds); }
std::string_view to_string(Awareness v) { return name_of(v, kAwareness); }
CovariateDist parse_covariate_dist(std::string_view s) {
  return parse_enum(s, kCovariates, "covariate distribution");
}
Location parse_location(std::string_view s) { return parse_enum(s, kLocations, "location"); }
CorruptionKind parse_corruption_kind(std::string_view s) {
  return parse_enum(s, kKinds, "corruption kind");
}
Awareness parse_awareness(std::string_view s) {
  return parse_enum(s, kAwareness, "adversary awareness");
}

std::size_t Dataset::corrupted_count() const {
  if (!corrupted_mask) return 0;
  return static_cast<std::size_t>(
      std::count(corrupted_mask->begin(), corrupted_mask->end(), std::uint8_t{1}));
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Dataset out;
  out.task = task;
  out.w_true = w_true;
  out.w_adv = w_adv;
  out.placement = placement;
  out.X.resize(static_cast<Index>(rows.size()), X.cols());
  if (has_labels()) out.y.resize(static_cast<Index>(rows.size()));
  if (corrupted_mask) out.corrupted_mask.emplace();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index i = rows[r];
    out.X.row(static_cast<Index>(r)) = X.row(i);
    if (has_labels()) out.y(static_cast<Index>(r)) = y(i);
    if (corrupted_mask) out.corrupted_mask->push_back((*corrupted_mask)[static_cast<std::size_t>(i)]);
  }
  return out;
}

Dataset Dataset::clean_subset() const {
  if (!corrupted_mask) {
    throw ParameterError("dataset has no corruption mask");
  }
  std::vector<Index> rows;
  for (Index i = 0; i < n(); ++i) {
    if ((*corrupted_mask)[static_cast<std::size_t>(i)] == 0) rows.push_back(i);
  }
  return subset(rows);
}

void AdversarySpec::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ParameterError("corruption rate alpha must lie in [0, 1)");
  }
  if (kind == CorruptionKind::constant && !std::isfinite(constant_value)) {
    throw ParameterError("constant corruption needs a finite value");
  }
  if (kind == CorruptionKind::multiplicative && !(mult_low > 0.0 && mult_high >= mult_low)) {
    throw ParameterError("multiplicative factor range must satisfy 0 < low <= high");
  }
}

Index AdversarySpec::corrupted_count(Index n) const {
  // The small offset keeps products such as 0.29 * 100 from rounding down.
  return static_cast<Index>(std::floor(alpha * static_cast<double>(n) + 1e-9));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vector random_unit_vector(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  do {
    for (Index j = 0; j < d; ++j) v(j) = normal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

Matrix gen_covariates(Index n, Index d, CovariateDist dist, std::uint64_t seed) {
  if (n < 1 || d < 1) {
    throw ParameterError("covariates need n >= 1 and d >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix X(n, d);
  for (Index i = 0; i < n; ++i) {
    if (dist == CovariateDist::unit_sphere) {
      X.row(i) = random_unit_vector(d, rng).transpose();
    } else {
      for (Index j = 0; j < d; ++j) X(i, j) = normal(rng);
    }
  }
  return X;
}

Vector gen_labels(const Matrix& X, const Vector& w_true, Task task, const LabelOptions& options) {
  if (X.cols() != w_true.size()) {
    throw ParameterError("w_true dimension does not match covariates");
  }
  const Vector eta = X * w_true;
  switch (task) {
    case Task::rr: {
      Vector y = eta;
      if (options.noise_beta_star) {
        const double beta_star = *options.noise_beta_star;
        if (!(beta_star > 0.0)) throw ParameterError("noise precision beta* must be > 0");
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> noise(0.0, 1.0 / std::sqrt(beta_star));
        for (Index i = 0; i < y.size(); ++i) y(i) += noise(rng);
      }
      return y;
    }
    case Task::lr: {
      Vector y(eta.size());
      for (Index i = 0; i < y.size(); ++i) y(i) = eta(i) > 0.0 ? 1.0 : -1.0;
      return y;
    }
    case Task::gamma: {
      if (!options.phi) throw ParameterError("gamma labels need the shape parameter phi");
      const double phi = *options.phi;
      if (!(phi > 0.0 && phi < 1.0)) throw ParameterError("phi must lie in (0, 1)");
      return ((-eta).array().exp() * (1.0 - phi)).matrix();
    }
    case Task::me:
      throw ParameterError("mean estimation data carries no labels");
  }
  throw ParameterError("unknown task");
}

LeverageScores leverage_scores(const Matrix& X) {
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double tol = std::max(X.rows(), X.cols()) * std::numeric_limits<double>::epsilon() *
                     (sv.size() > 0 ? sv(0) : 0.0);
  Index rank = 0;
  for (Index j = 0; j < sv.size(); ++j) {
    if (sv(j) > tol) ++rank;
  }
  LeverageScores out;
  out.rank_deficient = rank < X.cols();
  out.scores = svd.matrixU().leftCols(rank).rowwise().squaredNorm();
  return out;
}

std::vector<Index> random_locations(Index n, Index k, std::uint64_t seed) {
  if (k < 0 || k > n) throw ParameterError("cannot choose more locations than samples");
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Index> choose_locations(const AdversarySpec& spec, const Matrix& X, const Vector& y,
                                    std::uint64_t seed) {
  spec.validate();
  const Index n = X.rows();
  const Index k = spec.corrupted_count(n);
  switch (spec.location) {
    case Location::random:
      return random_locations(n, k, seed);
    case Location::magnitude: {
      // Points without labels are ranked by their own norm.
      const Vector keys = y.size() == n ? Vector(y.cwiseAbs()) : Vector(X.rowwise().norm());
      return top_k(keys, k);
    }
    case Location::leverage:
      return top_k(leverage_scores(X).scores, k);
  }
  throw ParameterError("unknown location strategy");
}

Dataset corrupt(Dataset data, const AdversarySpec& spec, std::uint64_t seed, double phi) {
  spec.validate();
  check_kind_for_task(spec.kind, data.task);
  const Index n = data.n();
  const Index d = data.d();
  if (data.task == Task::lr && spec.kind == CorruptionKind::constant &&
      spec.constant_value != 1.0 && spec.constant_value != -1.0) {
    throw ParameterError("constant corruption for lr must be -1 or +1");
  }
  if (data.task == Task::gamma && spec.kind == CorruptionKind::constant &&
      !(spec.constant_value > 0.0)) {
    throw ParameterError("constant corruption for gamma must be positive");
  }

  const auto locations = choose_locations(spec, data.X, data.y, derive_seed(seed, 0));
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);

  if (spec.kind == CorruptionKind::adversarial_model && !data.w_adv) {
    Vector adv = random_unit_vector(d, rng);
    if (data.task == Task::me) adv *= 6.0;
    data.w_adv = adv;
  }

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
  for (const Index i : locations) {
    mask[static_cast<std::size_t>(i)] = 1;
    if (data.task == Task::me) {
      switch (spec.kind) {
        case CorruptionKind::adversarial_model:
          for (Index j = 0; j < d; ++j) {
            data.X(i, j) = (*data.w_adv)(j) + normal(rng) / std::sqrt(static_cast<double>(d));
          }
          break;
        case CorruptionKind::sign_flip:
          data.X.row(i) = -data.X.row(i);
          break;
        case CorruptionKind::constant:
          data.X.row(i).setConstant(spec.constant_value);
          break;
        case CorruptionKind::multiplicative:
          break;  // rejected above
      }
      continue;
    }
    const double adv_eta =
        data.w_adv ? data.X.row(i).dot(*data.w_adv) : 0.0;
    double& yi = data.y(i);
    switch (spec.kind) {
      case CorruptionKind::adversarial_model:
        if (data.task == Task::rr) yi = adv_eta;
        else if (data.task == Task::lr) yi = adv_eta > 0.0 ? 1.0 : -1.0;
        else yi = (1.0 - phi) * std::exp(-adv_eta);
        break;
      case CorruptionKind::sign_flip:
        yi = -yi;
        break;
      case CorruptionKind::constant:
        yi = spec.constant_value;
        break;
      case CorruptionKind::multiplicative: {
        std::uniform_real_distribution<double> log_factor(std::log(spec.mult_low),
                                                          std::log(spec.mult_high));
        yi *= std::exp(log_factor(rng));
        break;
      }
    }
  }
  data.corrupted_mask = std::move(mask);
  data.placement = spec.location == Location::random ? "oblivious" : "adaptive";
  return data;
}

Dataset make_problem(const ProblemSpec& spec, std::uint64_t seed) {
  if (spec.n < 1 || spec.d < 1) throw ParameterError("problem needs n >= 1 and d >= 1");
  Dataset data;
  data.task = spec.task;
  std::mt19937_64 model_rng(derive_seed(seed, 2));
  if (spec.task == Task::me) {
    const Vector mu = spec.mean_norm * random_unit_vector(spec.d, model_rng);
    const Vector mu_adv = spec.adv_mean_norm * random_unit_vector(spec.d, model_rng);
    const Matrix noise = gen_covariates(spec.n, spec.d, CovariateDist::std_normal,
                                        derive_seed(seed, 1));
    data.X = (noise / std::sqrt(static_cast<double>(spec.d))).rowwise() + mu.transpose();
    data.w_true = mu;
    data.w_adv = mu_adv;
  } else {
    data.X = gen_covariates(spec.n, spec.d, spec.covariates, derive_seed(seed, 1));
    const Vector w = random_unit_vector(spec.d, model_rng);
    const Vector w_adv = random_unit_vector(spec.d, model_rng);
    LabelOptions labels;
    labels.noise_beta_star = spec.noise_beta_star;
    labels.phi = spec.phi;
    labels.seed = derive_seed(seed, 3);
    data.y = gen_labels(data.X, w, spec.task, labels);
    data.w_true = w;
    data.w_adv = w_adv;
  }
  return corrupt(std::move(data), spec.adversary, derive_seed(seed, 4), spec.phi);
}

double model_error(Task task, const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size()) {
    throw ParameterError("estimate and truth dimensions differ");
  }
  if (task == Task::lr) {
    const double en = estimate.norm();
    const double tn = truth.norm();
    if (en == 0.0 || tn == 0.0) return 1.0;
    return (estimate / en - truth / tn).norm();
  }
  return (estimate - truth).norm();
}

double angle_between(const Vector& a, const Vector& b) {
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) throw DomainError("angle with a zero vector is undefined");
  return std::acos(std::clamp(a.dot(b) / denom, -1.0, 1.0));
}

}  // namespace svam
