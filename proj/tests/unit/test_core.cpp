#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace sparsereg;
using sparsereg::testing::random_matrix;
using sparsereg::testing::random_vector;

namespace {

CoefVector coef(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return CoefVector(v);
}

}  // namespace

TEST(Gram, IdentityDesign) {
  const auto a = gram(DesignMatrix(Matrix::Identity(2, 2)));
  EXPECT_NEAR(a(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(a(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(a(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(a.column_scale(), std::sqrt(0.5), 1e-15);
}

TEST(Gram, SingleRowOuterProduct) {
  Matrix x(1, 2);
  x << 1.0, 2.0;
  const auto a = gram(DesignMatrix(x));
  EXPECT_DOUBLE_EQ(a(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(a(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(a(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(a(1, 1), 4.0);
  EXPECT_DOUBLE_EQ(a.column_scale(), 2.0);
}

TEST(Gram, MatchesTripleLoop) {
  RandomStream rng(11);
  const Matrix x = random_matrix(rng, 5, 3);
  const auto a = gram(DesignMatrix(x));
  for (int j = 0; j < 3; ++j) {
    for (int l = 0; l < 3; ++l) {
      double acc = 0.0;
      for (int i = 0; i < 5; ++i) acc += x(i, j) * x(i, l);
      EXPECT_NEAR(a(j, l), acc / 5.0, 1e-12);
    }
  }
}

TEST(Gram, RejectsAsymmetricOrIndefinite) {
  Matrix m(2, 2);
  m << 1.0, 0.3, 0.2, 1.0;
  EXPECT_THROW(GramMatrix{m}, Error);
  m << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(GramMatrix{m}, Error);
}

TEST(Inputs, RejectNonFinite) {
  Matrix x = Matrix::Ones(2, 2);
  x(0, 1) = std::nan("");
  EXPECT_THROW(DesignMatrix{x}, Error);
  EXPECT_THROW(ResponseVector(Vector::Constant(2, INFINITY)), Error);
}

TEST(ResidualCorrelation, VanishesAtLeastSquares) {
  RandomStream rng(3);
  const DesignMatrix x(random_matrix(rng, 12, 4));
  const ResponseVector y(random_vector(rng, 12));
  const CoefVector ls(x.values().colPivHouseholderQr().solve(y.values()));
  EXPECT_LT(residual_correlation(x, y, ls).values().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ResidualCorrelation, AtZeroIsNegativeCrossMoment) {
  RandomStream rng(4);
  const Matrix xm = random_matrix(rng, 7, 3);
  const Vector yv = random_vector(rng, 7);
  const auto g = residual_correlation(DesignMatrix(xm), ResponseVector(yv), CoefVector::zeros(3));
  for (int j = 0; j < 3; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 7; ++i) acc += yv(i) * xm(i, j);
    EXPECT_NEAR(g[static_cast<std::size_t>(j)], -acc / 7.0, 1e-12);
  }
}

TEST(ResidualCorrelation, MatchesDoubleLoop) {
  RandomStream rng(5);
  const Matrix xm = random_matrix(rng, 9, 4);
  const Vector yv = random_vector(rng, 9);
  const Vector bv = random_vector(rng, 4);
  const auto g = residual_correlation(DesignMatrix(xm), ResponseVector(yv), CoefVector(bv));
  for (int j = 0; j < 4; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 9; ++i) {
      double fit = 0.0;
      for (int l = 0; l < 4; ++l) fit += bv(l) * xm(i, l);
      acc += (fit - yv(i)) * xm(i, j);
    }
    EXPECT_NEAR(g[static_cast<std::size_t>(j)], acc / 9.0, 1e-12);
  }
}

TEST(ResidualCorrelation, DimensionMismatch) {
  const DesignMatrix x(Matrix::Ones(3, 2));
  try {
    residual_correlation(x, ResponseVector(Vector::Ones(4)), CoefVector::zeros(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(TailNorm, Examples) {
  const auto b = coef({3.0, -2.0, 1.0});
  EXPECT_DOUBLE_EQ(tail_norm(b, 1, NormIndex::one()), 3.0);
  EXPECT_DOUBLE_EQ(tail_norm(b, 0, NormIndex::two()), std::sqrt(14.0));
  EXPECT_DOUBLE_EQ(tail_norm(b, 3, NormIndex::two()), 0.0);
  EXPECT_DOUBLE_EQ(tail_norm(b, 2, NormIndex::inf()), 1.0);
}

TEST(TailNorm, NonIncreasingInK) {
  RandomStream rng(8);
  const CoefVector b(random_vector(rng, 10));
  for (const auto p : {NormIndex::one(), NormIndex::two(), NormIndex::inf()}) {
    for (std::size_t k = 1; k <= 10; ++k) EXPECT_LE(tail_norm(b, k, p), tail_norm(b, k - 1, p) + 1e-15);
  }
}

TEST(SupportThreshold, Examples) {
  const auto b = coef({0.5, -2.0, 0.0});
  EXPECT_EQ(support_threshold(b, 1.0), (IndexSet{1}));
  EXPECT_EQ(support_threshold(b, 0.0), (IndexSet{0, 1}));
  EXPECT_TRUE(support_threshold(b, 2.0).empty());
}

TEST(PNorm, Examples) {
  Vector v(2);
  v << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(p_norm(v, NormIndex::two()), 5.0);
  v << 3.0, -4.0;
  EXPECT_DOUBLE_EQ(p_norm(v, NormIndex::inf()), 4.0);
  EXPECT_DOUBLE_EQ(p_norm(Vector::Ones(3), NormIndex::one()), 3.0);
  Vector w(2);
  w << 1.0, 1.0;
  EXPECT_NEAR(p_norm(w, NormIndex(3.0)), std::cbrt(2.0), 1e-15);
}

TEST(NormIndex, ParseAndInverse) {
  EXPECT_TRUE(NormIndex::parse("inf").is_inf());
  EXPECT_DOUBLE_EQ(NormIndex::parse("2").value(), 2.0);
  EXPECT_DOUBLE_EQ(NormIndex::inf().inverse(), 0.0);
  EXPECT_EQ(NormIndex::one().label(), "1");
  EXPECT_THROW(NormIndex(0.5), Error);
  EXPECT_THROW(NormIndex::parse("two"), Error);
}

TEST(NormalizeColumns, UnitSecondMoment) {
  RandomStream rng(2);
  Matrix x = random_matrix(rng, 6, 4);
  x.col(2).setZero();
  const Matrix z = normalize_columns(x);
  for (Eigen::Index j = 0; j < 4; ++j) {
    if (j == 2) {
      EXPECT_EQ(z.col(j).norm(), 0.0);
    } else {
      EXPECT_NEAR(z.col(j).squaredNorm(), 6.0, 1e-10);
    }
  }
}

TEST(MagnitudeOrder, TiesToLowerIndex) {
  const auto b = coef({2.0, -2.0, 1.0, 2.0});
  EXPECT_EQ(magnitude_order(b.values()), (std::vector<std::size_t>{0, 1, 3, 2}));
}
