#include "oracles.hpp"
#include "svam/baselines.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace svam::baselines {
namespace {

Dataset rr_problem(double alpha, Index n, Index d, std::uint64_t seed,
                   std::optional<double> noise = std::nullopt) {
  ProblemSpec spec;
  spec.n = n;
  spec.d = d;
  spec.noise_beta_star = noise;
  spec.adversary.alpha = alpha;
  return make_problem(spec, seed);
}

TEST(Vam, EqualsEngineWithUnitIncrement) {
  const Dataset data = rr_problem(0.15, 500, 5, 1);
  SvamConfig cfg;
  cfg.beta1 = 2.0;
  cfg.xi = 1.0;
  cfg.max_iters = 15;
  const RunTrace ref = run_svam(data, Task::rr, cfg);
  const BaselineResult v = vam(data, Task::rr, 2.0, 15);
  ASSERT_TRUE(v.run.has_value());
  ASSERT_EQ(v.run->records.size(), ref.records.size());
  for (std::size_t k = 0; k < ref.records.size(); ++k) {
    EXPECT_EQ(v.run->records[k].t, ref.records[k].t);
    EXPECT_EQ(v.run->records[k].beta, ref.records[k].beta);
    EXPECT_TRUE(v.run->records[k].model == ref.records[k].model);
    EXPECT_EQ(v.run->records[k].dist, ref.records[k].dist);
    EXPECT_EQ(v.run->records[k].degenerate, ref.records[k].degenerate);
  }
  EXPECT_EQ(v.run->reason, ref.reason);
  EXPECT_EQ(v.trace.size(), ref.records.size() - 1);
  EXPECT_FALSE(v.trace.empty());
}

TEST(Vam, TinyScaleMatchesUnweightedFit) {
  const Dataset data = rr_problem(0.15, 500, 5, 2);
  const BaselineResult v = vam(data, Task::rr, 1e-8, 10);
  const BaselineResult m = mle_all(data, Task::rr);
  EXPECT_LT((v.model - m.model).norm(), 1e-3);
}

TEST(Vam, RejectsNonPositiveScale) {
  const Dataset data = rr_problem(0.0, 50, 2, 3);
  EXPECT_THROW(vam(data, Task::rr, 0.0, 10), ParameterError);
}

TEST(Mle, CleanRegressionExact) {
  const Dataset data = rr_problem(0.0, 200, 6, 4);
  EXPECT_LT((mle_all(data, Task::rr).model - *data.w_true).norm(), 1e-12);
}

TEST(Mle, MeanEstimationIsSampleMean) {
  ProblemSpec spec;
  spec.task = Task::me;
  spec.n = 300;
  spec.d = 4;
  spec.adversary.alpha = 0.1;
  const Dataset data = make_problem(spec, 5);
  const Vector mean = data.X.colwise().sum().transpose() / 300.0;
  EXPECT_LT((mle_all(data, Task::me).model - mean).norm(), 1e-13);
  const Dataset clean = data.clean_subset();
  const Vector clean_mean = clean.X.colwise().sum().transpose() / static_cast<double>(clean.n());
  EXPECT_LT((oracle(data, Task::me).model - clean_mean).norm(), 1e-13);
}

TEST(Mle, CorruptedRegressionWorseThanSvam) {
  const Dataset data = rr_problem(0.15, 1000, 10, 6);
  const double svam_err = *svam_rr(data, SvamConfig{}).final_dist();
  const double mle_err = (mle_all(data, Task::rr).model - *data.w_true).norm();
  EXPECT_GT(mle_err, svam_err);
}

TEST(Oracle, PureCorruptionExact) {
  const Dataset data = rr_problem(0.3, 300, 8, 7);
  EXPECT_LT((oracle(data, Task::rr).model - *data.w_true).norm(), 1e-12);
}

TEST(Oracle, HybridNoiseMatchesCleanOls) {
  const Dataset data = rr_problem(0.15, 400, 5, 8, 100.0);
  const Dataset clean = data.clean_subset();
  const Vector ref = oracle::qr_weighted_least_squares(clean.X, clean.y, Vector::Ones(clean.n()));
  EXPECT_LT((oracle(data, Task::rr).model - ref).norm(), 1e-12);
}

TEST(Oracle, NeedsMask) {
  Dataset data = rr_problem(0.1, 50, 2, 9);
  data.corrupted_mask.reset();
  EXPECT_THROW(oracle(data, Task::rr), ParameterError);
}

TEST(Torrent, ZeroHintIsOls) {
  const Dataset data = rr_problem(0.1, 100, 3, 10);
  const Vector ols = oracle::qr_weighted_least_squares(data.X, data.y, Vector::Ones(100));
  EXPECT_LT((torrent(data, 0.0).model - ols).norm(), 1e-12);
}

TEST(Torrent, SingleGrossCorruption) {
  Dataset data = rr_problem(0.0, 30, 2, 11);
  data.y(17) += 1000.0;
  std::vector<std::uint8_t> mask(30, 0);
  mask[17] = 1;
  data.corrupted_mask = mask;
  const BaselineResult res = torrent(data, 1.0 / 30.0);
  EXPECT_LT((res.model - *data.w_true).norm(), 1e-10);
  EXPECT_TRUE(res.converged);
  // The fixed-point active set is the 29 smallest residuals, and it excludes 17.
  const Vector r = (data.y - data.X * res.model).cwiseAbs();
  Index worst = 0;
  r.maxCoeff(&worst);
  EXPECT_EQ(worst, 17);
}

TEST(Torrent, EveryRefitUsesConstantSizeActiveSet) {
  const Dataset data = rr_problem(0.2, 120, 3, 12);
  const BaselineResult res = torrent(data, 0.2, 50);
  ASSERT_FALSE(res.trace.empty());
  const Index keep = 120 - 24;
  Vector prev = Vector::Zero(3);
  for (const Vector& w : res.trace) {
    const Vector r = (data.y - data.X * prev).cwiseAbs();
    std::vector<Index> order(120);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return r(a) < r(b); });
    Vector s = Vector::Zero(120);
    for (Index k = 0; k < keep; ++k) s(order[static_cast<std::size_t>(k)]) = 1.0;
    EXPECT_EQ(s.sum(), static_cast<double>(keep));
    EXPECT_LT((w - oracle::qr_weighted_least_squares(data.X, data.y, s)).norm(), 1e-10);
    prev = w;
  }
}

TEST(Torrent, BenchmarkReachesOracleLevel) {
  const Dataset data = rr_problem(0.15, 1000, 10, 13);
  EXPECT_LT((torrent(data, 0.15).model - *data.w_true).norm(), 1e-6);
}

TEST(Torrent, RejectsBadHint) {
  const Dataset data = rr_problem(0.0, 20, 2, 14);
  EXPECT_THROW(torrent(data, 1.0), ParameterError);
  EXPECT_THROW(torrent(data, -0.1), ParameterError);
}

TEST(Tukey, BisquareBoundary) {
  EXPECT_EQ(bisquare_weight(0.0, 4.685, 1.0), 1.0);
  EXPECT_EQ(bisquare_weight(4.685, 4.685, 1.0), 0.0);
  EXPECT_EQ(bisquare_weight(-9.0, 4.685, 1.0), 0.0);
  const double u = 0.5;
  EXPECT_DOUBLE_EQ(bisquare_weight(0.5 * 2.0 * 3.0, 2.0, 3.0), (1 - u * u) * (1 - u * u));
}

TEST(Tukey, CleanDataExact) {
  const Dataset data = rr_problem(0.0, 200, 5, 15);
  EXPECT_LT((tukey_bisquare(data).model - *data.w_true).norm(), 1e-12);
}

TEST(Tukey, ModerateCorruptionBetweenOracleAndMle) {
  ProblemSpec spec;
  spec.n = 1000;
  spec.d = 5;
  spec.noise_beta_star = 100.0;
  spec.adversary.alpha = 0.1;
  const Dataset data = make_problem(spec, 16);
  const double tukey_err = (tukey_bisquare(data).model - *data.w_true).norm();
  const double mle_err = (mle_all(data, Task::rr).model - *data.w_true).norm();
  const double oracle_err = (oracle(data, Task::rr).model - *data.w_true).norm();
  EXPECT_LT(tukey_err, mle_err);
  EXPECT_GE(tukey_err, oracle_err);
}

TEST(Medians, SinglePoint) {
  Matrix p(1, 3);
  p << 1.0, -2.0, 0.5;
  EXPECT_TRUE(coordinate_median(p) == p.row(0).transpose());
  EXPECT_LT((geometric_median(p).median - p.row(0).transpose()).norm(), 1e-15);
}

TEST(Medians, CoordinateLowerMiddle) {
  Matrix p(4, 2);
  p << 4, 0, 1, 3, 3, 2, 2, 1;
  Vector expect(2);
  expect << 2, 1;
  EXPECT_TRUE(coordinate_median(p) == expect);
}

TEST(Medians, SymmetricCloudCentre) {
  const Matrix half = gen_covariates(50, 3, CovariateDist::std_normal, 17);
  Vector c(3);
  c << 1.0, -1.0, 2.0;
  Matrix p(100, 3);
  p << half.rowwise() + c.transpose(), (-half).rowwise() + c.transpose();
  EXPECT_LT((geometric_median(p).median - c).norm(), 1e-8);
  Matrix q(101, 3);
  q << p, c.transpose();
  EXPECT_LT((coordinate_median(q) - c).norm(), 1e-15);
}

TEST(Medians, ThreePointGeometricMedianMatchesGridSearch) {
  Matrix p(3, 2);
  p << 0, 0, 1, 0, 0, 1;
  const Vector ref = oracle::grid_minimize_2d(
      [&](const Vector& m) { return (p.rowwise() - m.transpose()).rowwise().norm().sum(); }, -1.0,
      2.0);
  const GeometricMedian gm = geometric_median(p, 1e-12);
  EXPECT_LT((gm.median - ref).norm(), 1e-6);
  EXPECT_NEAR(gm.median(0), 0.2113, 1e-4);
  EXPECT_NEAR(gm.median(1), 0.2113, 1e-4);
  EXPECT_TRUE(gm.converged);
}

TEST(Medians, WeiszfeldObjectiveNonIncreasing) {
  const Matrix p = gen_covariates(200, 4, CovariateDist::std_normal, 18).array().cube();
  const GeometricMedian gm = geometric_median(p, 1e-12);
  ASSERT_GE(gm.objective.size(), 2u);
  for (std::size_t k = 1; k < gm.objective.size(); ++k) {
    EXPECT_LE(gm.objective[k], gm.objective[k - 1] * (1 + 1e-15));
  }
  EXPECT_NEAR(gm.objective.back(), sum_of_distances(p, gm.median), 1e-12);
}

TEST(Medians, IterateOnDataPointWithMajorityStops) {
  // The mean is a data point that carries most of the mass.
  Matrix p(5, 2);
  p << 0, 0, 0, 0, 0, 0, 1, 0, -1, 0;
  const GeometricMedian gm = geometric_median(p);
  EXPECT_TRUE(gm.converged);
  EXPECT_LT(gm.median.norm(), 1e-15);
}

TEST(Medians, EmptyRejected) {
  EXPECT_THROW(coordinate_median(Matrix(0, 2)), ParameterError);
  EXPECT_THROW(geometric_median(Matrix(0, 2)), ParameterError);
}

}  // namespace
}  // namespace svam::baselines
