#include "svam/data_gen.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace svam {
namespace {

TEST(Covariates, UnitSphereRowsHaveUnitNorm) {
  const Matrix X = gen_covariates(500, 7, CovariateDist::unit_sphere, 1);
  for (Index i = 0; i < X.rows(); ++i) EXPECT_NEAR(X.row(i).norm(), 1.0, 1e-12);
}

TEST(Covariates, StdNormalMoments) {
  const Matrix X = gen_covariates(100000, 1, CovariateDist::std_normal, 2);
  const double mean = X.mean();
  const double var = (X.array() - mean).square().sum() / static_cast<double>(X.rows() - 1);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Covariates, SameSeedSameMatrix) {
  EXPECT_TRUE(gen_covariates(50, 4, CovariateDist::std_normal, 3) ==
              gen_covariates(50, 4, CovariateDist::std_normal, 3));
  EXPECT_FALSE(gen_covariates(50, 4, CovariateDist::std_normal, 3) ==
               gen_covariates(50, 4, CovariateDist::std_normal, 4));
}

TEST(Seeds, DerivedStreamsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 8; ++s) seen.insert(derive_seed(42, s));
  EXPECT_EQ(seen.size(), 8u);
  EXPECT_EQ(derive_seed(42, 3), derive_seed(42, 3));
}

TEST(Labels, PureRegressionZeroModel) {
  const Matrix X = gen_covariates(20, 3, CovariateDist::std_normal, 5);
  EXPECT_TRUE(gen_labels(X, Vector::Zero(3), Task::rr).isZero(0.0));
}

TEST(Labels, PureRegressionIsLinear) {
  const Matrix X = gen_covariates(20, 3, CovariateDist::std_normal, 5);
  const Vector w = Vector::LinSpaced(3, -1.0, 2.0);
  EXPECT_LT((gen_labels(X, w, Task::rr) - X * w).norm(), 1e-14);
}

TEST(Labels, HybridNoiseVariance) {
  const Matrix X = gen_covariates(50000, 2, CovariateDist::std_normal, 6);
  const Vector w = Vector::Ones(2);
  LabelOptions opt;
  opt.noise_beta_star = 100.0;
  opt.seed = 7;
  const Vector e = gen_labels(X, w, Task::rr, opt) - X * w;
  const double var = e.squaredNorm() / static_cast<double>(e.size());
  EXPECT_NEAR(var, 0.01, 0.0005);
}

TEST(Labels, LogisticSignAntisymmetry) {
  const Matrix X = gen_covariates(100, 4, CovariateDist::std_normal, 8);
  const Vector w = Vector::LinSpaced(4, -1.0, 1.5);
  const Vector a = gen_labels(X, w, Task::lr);
  const Vector b = gen_labels(X, -w, Task::lr);
  for (Index i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a(i) == 1.0 || a(i) == -1.0);
    EXPECT_EQ(a(i), -b(i));
  }
}

TEST(Labels, GammaZeroModelGivesMode) {
  const Matrix X = gen_covariates(10, 3, CovariateDist::unit_sphere, 9);
  LabelOptions opt;
  opt.phi = 0.5;
  const Vector y = gen_labels(X, Vector::Zero(3), Task::gamma, opt);
  for (Index i = 0; i < y.size(); ++i) EXPECT_EQ(y(i), 0.5);
}

TEST(Labels, GammaLabelsAreModesOfUnitScaleDensity) {
  const Matrix X = gen_covariates(10, 3, CovariateDist::unit_sphere, 10);
  const Vector w = Vector::LinSpaced(3, 0.2, -0.7);
  LabelOptions opt;
  opt.phi = 0.3;
  const Vector y = gen_labels(X, w, Task::gamma, opt);
  for (Index i = 0; i < y.size(); ++i) {
    const double eta = std::exp(X.row(i).dot(w));
    EXPECT_NEAR(y(i), (1.0 - 0.3) / eta, 1e-15);
  }
}

TEST(Labels, GammaNeedsShape) {
  const Matrix X = gen_covariates(5, 2, CovariateDist::unit_sphere, 11);
  EXPECT_THROW(gen_labels(X, Vector::Zero(2), Task::gamma), ParameterError);
}

TEST(Leverage, IdentityGivesOnes) {
  const LeverageScores lev = leverage_scores(Matrix::Identity(5, 5));
  EXPECT_LT((lev.scores - Vector::Ones(5)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_FALSE(lev.rank_deficient);
}

TEST(Leverage, SingleColumnHandValues) {
  Matrix X(3, 1);
  X << 1, 2, 3;
  Vector expect(3);
  expect << 1.0 / 14, 4.0 / 14, 9.0 / 14;
  EXPECT_LT((leverage_scores(X).scores - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Leverage, TraceEqualsRankAndMatchesHatMatrix) {
  const Matrix X = gen_covariates(60, 5, CovariateDist::std_normal, 12);
  const Vector s = leverage_scores(X).scores;
  EXPECT_NEAR(s.sum(), 5.0, 1e-12);
  const Matrix H = X * (X.transpose() * X).inverse() * X.transpose();
  EXPECT_LT((s - H.diagonal()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(s.minCoeff(), 0.0);
  EXPECT_LE(s.maxCoeff(), 1.0 + 1e-12);
}

TEST(Leverage, RankDeficientUsesPseudoInverse) {
  Matrix X(4, 2);
  X << 1, 2, 2, 4, 3, 6, 4, 8;
  const LeverageScores lev = leverage_scores(X);
  EXPECT_TRUE(lev.rank_deficient);
  EXPECT_NEAR(lev.scores.sum(), 1.0, 1e-12);
  EXPECT_NEAR(lev.scores(3), 16.0 / 30.0, 1e-12);
}

TEST(Locations, ZeroAlphaIsEmpty) {
  AdversarySpec spec;
  const Matrix X = gen_covariates(10, 2, CovariateDist::std_normal, 13);
  EXPECT_TRUE(choose_locations(spec, X, Vector::Zero(10), 1).empty());
}

TEST(Locations, CountIsFloorOfAlphaN) {
  AdversarySpec spec;
  spec.alpha = 0.15;
  EXPECT_EQ(spec.corrupted_count(1000), 150);
  EXPECT_EQ(spec.corrupted_count(99), 14);
  spec.alpha = 0.1;
  EXPECT_EQ(spec.corrupted_count(30), 3);
  spec.alpha = 1.0 / 30.0;
  EXPECT_EQ(spec.corrupted_count(30), 1);
}

TEST(Locations, MagnitudePicksLargestAbsoluteLabel) {
  AdversarySpec spec;
  spec.alpha = 1.0 / 3.0;
  spec.location = Location::magnitude;
  Matrix X = Matrix::Ones(3, 1);
  Vector y(3);
  y << 1, -5, 2;
  EXPECT_EQ(choose_locations(spec, X, y, 0), std::vector<Index>{1});
}

TEST(Locations, TiesGoToLowestIndex) {
  AdversarySpec spec;
  spec.alpha = 0.5;
  spec.location = Location::magnitude;
  Vector y(4);
  y << 2, -2, 2, 1;
  EXPECT_EQ(choose_locations(spec, Matrix::Ones(4, 1), y, 0), (std::vector<Index>{0, 1}));
}

TEST(Locations, LeveragePicksHighLeverageRow) {
  AdversarySpec spec;
  spec.alpha = 1.0 / 3.0;
  spec.location = Location::leverage;
  Matrix X(3, 1);
  X << 1, 2, 3;
  EXPECT_EQ(choose_locations(spec, X, Vector::Zero(3), 0), std::vector<Index>{2});
}

TEST(Locations, RandomIsSortedDistinctAndSeeded) {
  const auto a = random_locations(100, 30, 14);
  EXPECT_EQ(a.size(), 30u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<Index>(a.begin(), a.end()).size(), 30u);
  EXPECT_EQ(a, random_locations(100, 30, 14));
  EXPECT_NE(a, random_locations(100, 30, 15));
}

TEST(Locations, RandomIsRoughlyUniform) {
  std::vector<int> hits(10, 0);
  for (std::uint64_t s = 0; s < 4000; ++s) {
    for (const Index i : random_locations(10, 3, s)) ++hits[static_cast<std::size_t>(i)];
  }
  // Expected 1200 per index; binomial sd is about 29.
  for (const int h : hits) EXPECT_NEAR(h, 1200, 150);
}

Dataset clean_rr(Index n, Index d, std::uint64_t seed) {
  ProblemSpec spec;
  spec.n = n;
  spec.d = d;
  return make_problem(spec, seed);
}

TEST(Corrupt, ZeroAlphaLeavesDataUnchanged) {
  const Dataset data = clean_rr(40, 3, 16);
  const Dataset out = corrupt(data, AdversarySpec{}, 1);
  EXPECT_TRUE(out.y == data.y);
  EXPECT_TRUE(out.X == data.X);
  EXPECT_EQ(out.corrupted_count(), 0u);
}

TEST(Corrupt, ConstantKindWritesConstant) {
  const Dataset data = clean_rr(40, 3, 17);
  AdversarySpec spec;
  spec.alpha = 0.25;
  spec.kind = CorruptionKind::constant;
  spec.constant_value = 7.5;
  const Dataset out = corrupt(data, spec, 2);
  for (Index i = 0; i < out.n(); ++i) {
    if ((*out.corrupted_mask)[static_cast<std::size_t>(i)]) {
      EXPECT_EQ(out.y(i), 7.5);
    } else {
      EXPECT_EQ(out.y(i), data.y(i));
    }
  }
  EXPECT_EQ(out.corrupted_count(), 10u);
}

TEST(Corrupt, AdversarialModelLabelsAreInnerProducts) {
  const Dataset data = clean_rr(200, 5, 18);
  AdversarySpec spec;
  spec.alpha = 0.15;
  const Dataset out = corrupt(data, spec, 3);
  ASSERT_TRUE(out.w_adv.has_value());
  EXPECT_NEAR(out.w_adv->norm(), 1.0, 1e-14);
  for (Index i = 0; i < out.n(); ++i) {
    double expect = data.y(i);
    if ((*out.corrupted_mask)[static_cast<std::size_t>(i)]) {
      expect = 0.0;
      for (Index j = 0; j < out.d(); ++j) expect += out.X(i, j) * (*out.w_adv)(j);
    }
    EXPECT_NEAR(out.y(i), expect, 1e-14);
  }
  EXPECT_EQ(out.placement, "oblivious");
}

TEST(Corrupt, MaskCountAndCleanPreservationAcrossKinds) {
  struct Case {
    Task task;
    CorruptionKind kind;
    Location loc;
  };
  const Case cases[] = {
      {Task::rr, CorruptionKind::sign_flip, Location::magnitude},
      {Task::lr, CorruptionKind::sign_flip, Location::random},
      {Task::gamma, CorruptionKind::multiplicative, Location::leverage},
      {Task::me, CorruptionKind::adversarial_model, Location::random},
  };
  for (const Case& c : cases) {
    for (const double alpha : {0.0, 0.07, 0.2, 0.33}) {
      ProblemSpec spec;
      spec.task = c.task;
      spec.n = 301;
      spec.d = 4;
      spec.covariates = c.task == Task::gamma ? CovariateDist::unit_sphere : CovariateDist::std_normal;
      const Dataset clean = make_problem(spec, 19);
      spec.adversary.alpha = alpha;
      spec.adversary.kind = c.kind;
      spec.adversary.location = c.loc;
      const Dataset out = make_problem(spec, 19);
      EXPECT_EQ(out.corrupted_count(),
                static_cast<std::size_t>(std::floor(alpha * 301 + 1e-9)));
      EXPECT_EQ(out.placement, c.loc == Location::random ? "oblivious" : "adaptive");
      for (Index i = 0; i < out.n(); ++i) {
        if ((*out.corrupted_mask)[static_cast<std::size_t>(i)]) continue;
        if (c.task == Task::me) {
          EXPECT_TRUE(out.X.row(i) == clean.X.row(i));
        } else {
          EXPECT_EQ(out.y(i), clean.y(i));
        }
      }
    }
  }
}

TEST(Corrupt, MultiplicativeFactorsInRange) {
  ProblemSpec spec;
  spec.task = Task::gamma;
  spec.n = 500;
  spec.d = 3;
  spec.covariates = CovariateDist::unit_sphere;
  const Dataset clean = make_problem(spec, 20);
  spec.adversary.alpha = 0.2;
  spec.adversary.kind = CorruptionKind::multiplicative;
  const Dataset out = make_problem(spec, 20);
  for (Index i = 0; i < out.n(); ++i) {
    if (!(*out.corrupted_mask)[static_cast<std::size_t>(i)]) continue;
    const double b = out.y(i) / clean.y(i);
    EXPECT_GE(b, 10.0 * (1 - 1e-12));
    EXPECT_LE(b, 1000.0 * (1 + 1e-12));
  }
}

TEST(Corrupt, IncompatibleKindsRejected) {
  const Dataset rr = clean_rr(20, 2, 21);
  AdversarySpec spec;
  spec.alpha = 0.1;
  spec.kind = CorruptionKind::multiplicative;
  EXPECT_THROW(corrupt(rr, spec, 1), ParameterError);

  ProblemSpec gs;
  gs.task = Task::gamma;
  gs.n = 20;
  gs.d = 2;
  gs.covariates = CovariateDist::unit_sphere;
  const Dataset gamma = make_problem(gs, 22);
  spec.kind = CorruptionKind::sign_flip;
  EXPECT_THROW(corrupt(gamma, spec, 1), ParameterError);
  spec.kind = CorruptionKind::constant;
  spec.constant_value = -1.0;
  EXPECT_THROW(corrupt(gamma, spec, 1), ParameterError);

  ProblemSpec ls;
  ls.task = Task::lr;
  ls.n = 20;
  ls.d = 2;
  const Dataset lr = make_problem(ls, 23);
  spec.constant_value = 0.5;
  EXPECT_THROW(corrupt(lr, spec, 1), ParameterError);

  spec = {};
  spec.alpha = 1.5;
  EXPECT_THROW(corrupt(rr, spec, 1), ParameterError);
}

TEST(MakeProblem, SeededDeterminism) {
  ProblemSpec spec;
  spec.adversary.alpha = 0.15;
  const Dataset a = make_problem(spec, 24);
  const Dataset b = make_problem(spec, 24);
  EXPECT_TRUE(a.X == b.X);
  EXPECT_TRUE(a.y == b.y);
  EXPECT_EQ(*a.corrupted_mask, *b.corrupted_mask);
  EXPECT_TRUE(*a.w_true == *b.w_true);
  EXPECT_TRUE(*a.w_adv == *b.w_adv);
  const Dataset c = make_problem(spec, 25);
  EXPECT_FALSE(a.y == c.y);
}

TEST(MakeProblem, MeanEstimationGeometry) {
  ProblemSpec spec;
  spec.task = Task::me;
  spec.n = 20000;
  spec.d = 8;
  spec.adversary.alpha = 0.1;
  const Dataset data = make_problem(spec, 26);
  EXPECT_NEAR(data.w_true->norm(), 2.0, 1e-12);
  EXPECT_NEAR(data.w_adv->norm(), 6.0, 1e-12);
  EXPECT_EQ(data.y.size(), 0);
  const Dataset clean = data.clean_subset();
  const Vector mean = clean.X.colwise().mean().transpose();
  EXPECT_LT((mean - *data.w_true).norm(), 0.05);
}

TEST(MakeProblem, ModelsAreUnitVectors) {
  ProblemSpec spec;
  spec.adversary.alpha = 0.1;
  const Dataset data = make_problem(spec, 27);
  EXPECT_NEAR(data.w_true->norm(), 1.0, 1e-14);
  EXPECT_NEAR(data.w_adv->norm(), 1.0, 1e-14);
}

TEST(Subsets, CleanSubsetDropsMaskedRows) {
  ProblemSpec spec;
  spec.n = 100;
  spec.d = 3;
  spec.adversary.alpha = 0.3;
  const Dataset data = make_problem(spec, 28);
  const Dataset clean = data.clean_subset();
  EXPECT_EQ(clean.n(), 70);
  EXPECT_EQ(clean.corrupted_count(), 0u);
  Dataset no_mask = data;
  no_mask.corrupted_mask.reset();
  EXPECT_THROW(no_mask.clean_subset(), ParameterError);
  const Dataset sub = data.subset({0, 5, 99});
  EXPECT_EQ(sub.n(), 3);
  EXPECT_EQ(sub.y(2), data.y(99));
}

TEST(ModelError, LogisticIgnoresScale) {
  Vector w(2);
  w << 1.0, 0.0;
  EXPECT_NEAR(model_error(Task::lr, 5.0 * w, w), 0.0, 1e-15);
  EXPECT_NEAR(model_error(Task::rr, 5.0 * w, w), 4.0, 1e-15);
  Vector v(2);
  v << 0.0, 1.0;
  EXPECT_NEAR(angle_between(w, v), std::acos(0.0), 1e-15);
}

TEST(Enums, RoundTripNames) {
  for (const auto k : {CorruptionKind::adversarial_model, CorruptionKind::sign_flip,
                       CorruptionKind::constant, CorruptionKind::multiplicative}) {
    EXPECT_EQ(parse_corruption_kind(to_string(k)), k);
  }
  for (const auto l : {Location::random, Location::magnitude, Location::leverage}) {
    EXPECT_EQ(parse_location(to_string(l)), l);
  }
  EXPECT_THROW(parse_location("nowhere"), ParameterError);
}

}  // namespace
}  // namespace svam
