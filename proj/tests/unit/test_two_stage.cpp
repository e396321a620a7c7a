#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace sparsereg;
using sparsereg::testing::orthonormal_design;
using sparsereg::testing::random_matrix;
using sparsereg::testing::random_vector;

namespace {

CoefVector coef3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return CoefVector(v);
}

}  // namespace

TEST(SelectFeatures, Examples) {
  const auto b = coef3(5.0, 0.1, -3.0);
  EXPECT_EQ(select_features(b, TopQRule{2}), (IndexSet{0, 2}));
  EXPECT_EQ(select_features(b, ThresholdRule{1.0}), (IndexSet{0, 2}));
  EXPECT_EQ(select_features(coef3(2.0, -2.0, 1.0), TopQRule{1}), (IndexSet{0}));
}

TEST(SelectFeatures, TopQFillsWithZerosAndChecksRange) {
  const auto b = coef3(0.0, 4.0, 0.0);
  EXPECT_EQ(select_features(b, TopQRule{2}), (IndexSet{0, 1}));
  EXPECT_EQ(select_features(b, TopQRule{0}), IndexSet{});
  EXPECT_THROW(select_features(b, TopQRule{4}), Error);
  EXPECT_THROW(select_features(b, ThresholdRule{0.0}), Error);
}

TEST(TwoStage, QZeroReproducesStageOne) {
  RandomStream rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const DesignMatrix x(random_matrix(rng, 25, 40));
    const ResponseVector y(random_vector(rng, 25));
    const auto r = run_two_stage(x, y, rng.uniform(0.05, 1.0), TopQRule{0});
    EXPECT_TRUE(r.selected.empty());
    EXPECT_LE((r.stage1.beta.values() - r.stage2.beta.values()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(TwoStage, OrthonormalUnshrinksSelected) {
  RandomStream rng(22);
  const Matrix xm = orthonormal_design(rng, 6, 2);
  Vector z(2);
  z << 3.0, 1.0;
  const auto r = run_two_stage(DesignMatrix(xm), ResponseVector(xm * z), 1.0, TopQRule{1});
  EXPECT_NEAR(r.stage1.beta[0], 2.5, 1e-10);
  EXPECT_NEAR(r.stage1.beta[1], 0.5, 1e-10);
  EXPECT_EQ(r.selected, (IndexSet{0}));
  EXPECT_NEAR(r.stage2.beta[0], 3.0, 1e-10);
  EXPECT_NEAR(r.stage2.beta[1], 0.5, 1e-10);
}

TEST(TwoStage, ThresholdAboveMaxSelectsNothing) {
  RandomStream rng(23);
  const DesignMatrix x(random_matrix(rng, 20, 8));
  const ResponseVector y(random_vector(rng, 20));
  const auto r = run_two_stage(x, y, 0.3, ThresholdRule{100.0});
  EXPECT_TRUE(r.selected.empty());
  EXPECT_LE((r.stage1.beta.values() - r.stage2.beta.values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TwoStage, TrainingErrorNonIncreasingInQ) {
  RandomStream rng(24);
  const DesignMatrix x(random_matrix(rng, 25, 30));
  const ResponseVector y(random_vector(rng, 25));
  double previous = INFINITY;
  for (std::size_t q = 0; q <= 6; ++q) {
    const auto r = run_two_stage(x, y, 0.5, TopQRule{q});
    const double err = mean_squared_error(x, y, r.stage2.beta);
    EXPECT_LE(err, previous + 1e-10);
    previous = err;
  }
}

TEST(Tuning, QGridZeroIsPlainLassoCv) {
  RandomStream rng(31);
  const DesignMatrix x(random_matrix(rng, 30, 10));
  const ResponseVector y(random_vector(rng, 30));
  const auto r = tune_sequential(x, y, {0.01, 0.1, 1.0}, {0}, 5, 7);
  EXPECT_EQ(r.q_star, 0u);
  double best = INFINITY;
  double best_lambda = 0.0;
  for (const auto& row : r.cv_table) {
    if (row.stage == 1 && row.mean_error < best) {
      best = row.mean_error;
      best_lambda = row.lambda;
    }
  }
  EXPECT_EQ(r.lambda_star, best_lambda);
}

TEST(Tuning, SparseNoiselessTargetPrefersSelection) {
  RandomStream rng(32);
  const Eigen::Index n = 40, d = 10;
  const Matrix xm = orthonormal_design(rng, n, d);
  Vector beta = Vector::Zero(d);
  beta(1) = 5.0;
  beta(6) = -4.0;
  const auto grid = default_lambda_grid(DesignMatrix(xm), ResponseVector(xm * beta), 24);
  const auto r = tune_sequential(DesignMatrix(xm), ResponseVector(xm * beta), grid, {0, 1, 2, 3, 4}, 4, 3);
  double q0 = INFINITY, best = INFINITY;
  for (const auto& row : r.cv_table) {
    if (row.stage != 2) continue;
    if (row.q == 0) q0 = row.mean_error;
    if (row.q == r.q_star) best = row.mean_error;
  }
  EXPECT_GE(r.q_star, 1u);
  EXPECT_LE(best, q0);
}

TEST(Tuning, DuplicatedDataSameSelection) {
  RandomStream rng(33);
  const Matrix xm = random_matrix(rng, 20, 8);
  const Vector yv = random_vector(rng, 20) + 2.0 * xm.col(3);
  const std::vector<double> grid{0.02, 0.05, 0.1, 0.2, 0.5};
  const std::vector<std::size_t> qs{0, 1, 2, 3};
  const auto folds = cv_fold_assignment(20, 4, 5);
  const auto single = tune_sequential(DesignMatrix(xm), ResponseVector(yv), grid, qs, folds);

  Matrix x2(40, 8);
  x2 << xm, xm;
  Vector y2(40);
  y2 << yv, yv;
  std::vector<std::size_t> folds2 = folds;
  folds2.insert(folds2.end(), folds.begin(), folds.end());
  const auto doubled = tune_sequential(DesignMatrix(x2), ResponseVector(y2), grid, qs, folds2);
  EXPECT_EQ(single.lambda_star, doubled.lambda_star);
  EXPECT_EQ(single.q_star, doubled.q_star);
  ASSERT_EQ(single.cv_table.size(), doubled.cv_table.size());
  for (std::size_t i = 0; i < single.cv_table.size(); ++i) {
    EXPECT_NEAR(single.cv_table[i].mean_error, doubled.cv_table[i].mean_error, 1e-8);
  }
}

TEST(Tuning, TiesPreferLargerLambdaAndSmallerQ) {
  // Zero response: every candidate predicts 0 exactly, so all errors tie.
  RandomStream rng(34);
  const DesignMatrix x(random_matrix(rng, 12, 5));
  const ResponseVector y(Vector::Zero(12));
  const auto r = tune_sequential(x, y, {0.1, 0.5, 0.2}, {3, 1, 2}, 3, 1);
  EXPECT_EQ(r.lambda_star, 0.5);
  EXPECT_EQ(r.q_star, 1u);
}

TEST(Tuning, FoldAssignmentBalancedAndSeeded) {
  const auto f = cv_fold_assignment(23, 5, 42);
  std::vector<int> counts(5, 0);
  for (auto v : f) counts[v]++;
  for (int c : counts) EXPECT_TRUE(c == 4 || c == 5);
  EXPECT_EQ(f, cv_fold_assignment(23, 5, 42));
  EXPECT_NE(f, cv_fold_assignment(23, 5, 43));
  EXPECT_THROW(cv_fold_assignment(3, 5, 1), Error);
}
