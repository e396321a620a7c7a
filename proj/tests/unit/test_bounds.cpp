#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace sparsereg;

namespace {

/// Inputs on an identity Gram matrix of size d with every quantity block the bounds may ask for.
BoundInputs identity_inputs(std::size_t d, std::size_t k, std::size_t ell, std::size_t s) {
  BoundInputs in;
  in.n = 100;
  in.d = d;
  in.k = k;
  in.ell = ell;
  in.s = s;
  in.q = k;
  in.coherence = 0.0;
  const GramMatrix id(Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  DiagnosticsConfig cfg;
  cfg.pi_heuristic = false;
  for (const auto p : {NormIndex::one(), NormIndex::two(), NormIndex::inf()}) {
    for (std::size_t block : {k + ell, s + ell, 2 * s}) {
      for (std::size_t l : {ell, s}) {
        if (block > l && block + l <= d) in.quantities.add(compute_quantities(id, block, l, p, cfg));
      }
    }
  }
  return in;
}

double hand_noise_rate(std::size_t d, double delta, std::size_t n) {
  return std::sqrt(2.0 * std::log(2.0 * static_cast<double>(d) / delta) / static_cast<double>(n));
}

}  // namespace

TEST(LambdaFloor, Examples) {
  BoundInputs in;
  in.n = 25;
  in.d = 100;
  in.sigma = 0.0;
  EXPECT_EQ(lambda_floor(in), 0.0);

  // ln(2d/delta) = 3 and n = 6 give a noise rate of exactly 1
  in.t = 1.0;
  in.sigma = 1.0;
  in.a = 1.0;
  in.d = 10;
  in.delta = 20.0 * std::exp(-3.0);
  in.n = 6;
  EXPECT_NEAR(lambda_floor(in), 4.0, 1e-12);

  in.t = 0.5;
  in.d = 100;
  in.delta = 0.05;
  in.n = 25;
  in.sigma = 1.0;
  in.a = 1.0;
  EXPECT_NEAR(lambda_floor(in), 12.0 * std::sqrt(2.0 * std::log(4000.0) / 25.0), 1e-12);
}

TEST(Theorem41, ExactSparseClaim2) {
  auto in = identity_inputs(10, 2, 3, 2);
  in.lambda = 0.1;
  in.t = 0.5;
  const auto r = theorem41_rhs(in, 2, NormIndex::two());
  ASSERT_TRUE(r.rhs.has_value());
  // mu = 1 on the identity
  EXPECT_NEAR(*r.rhs, 8.0 / 0.5 * 0.1 * std::sqrt(5.0), 1e-12);
}

TEST(Theorem41, ZeroInputsGiveZero) {
  auto in = identity_inputs(10, 2, 3, 2);
  for (int claim : {1, 2}) {
    const auto r = theorem41_rhs(in, claim, NormIndex::two());
    ASSERT_TRUE(r.rhs.has_value());
    EXPECT_EQ(*r.rhs, 0.0);
  }
}

TEST(Theorem41, PiGateBlocksRhs) {
  auto in = identity_inputs(10, 2, 3, 2);
  in.quantities.set(5, 3, NormIndex::two(), "pi", Quantity{2.0, Exactness::UpperBound, false});
  const auto r = theorem41_rhs(in, 1, NormIndex::two());
  EXPECT_FALSE(r.conditions_hold());
  EXPECT_FALSE(r.rhs.has_value());
}

TEST(Theorem41, MissingOrWrongDirectionQuantity) {
  BoundInputs in;
  in.d = 10;
  in.k = 2;
  in.ell = 3;
  try {
    theorem41_rhs(in, 1, NormIndex::two());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingQuantity);
  }
  auto full = identity_inputs(10, 2, 3, 2);
  full.quantities.set(5, 3, NormIndex::two(), "mu", Quantity{1.0, Exactness::UpperBound, false});
  EXPECT_THROW(theorem41_rhs(full, 2, NormIndex::two()), Error);
}

TEST(Corollary41, Examples) {
  BoundInputs in;
  in.n = 100;
  in.d = 20;
  in.k = 4;
  in.ell = 4;
  in.t = 0.5;
  in.lambda = 0.1;
  in.coherence = 0.0;
  auto r = corollary41_rhs(in);
  ASSERT_TRUE(r.rhs.has_value());
  EXPECT_NEAR(*r.rhs, 4.8, 1e-12);

  in.lambda = 0.0;
  EXPECT_EQ(*corollary41_rhs(in).rhs, 0.0);

  // p = 1: the tail1 term does not depend on ell.
  in.p = NormIndex::one();
  in.tail1 = 0.7;
  in.ell = 4;
  const double a = *corollary41_rhs(in).rhs;
  in.ell = 7;
  const double b = *corollary41_rhs(in).rhs;
  EXPECT_NEAR(a, b, 1e-12);
  in.tailp = 0.0;
  EXPECT_NEAR(a, 4.0 * (8.0 - 3.5) / 0.5 * 0.7, 1e-12);
}

TEST(Corollary41, CoherenceGate) {
  BoundInputs in;
  in.d = 20;
  in.k = 2;
  in.ell = 3;
  in.t = 0.5;
  in.coherence = 0.5;
  EXPECT_FALSE(corollary41_rhs(in).rhs.has_value());
  in.coherence.reset();
  EXPECT_THROW(corollary41_rhs(in), Error);
}

TEST(Corollary51, ZeroEpsilonIsCorollary41WithDoubledK) {
  BoundInputs in;
  in.n = 200;
  in.d = 40;
  in.k = 2;
  in.ell = 5;
  in.t = 0.6;
  in.lambda = 0.3;
  in.tail1 = 0.4;
  in.tailp = 0.2;
  in.coherence = 0.0;
  const double c51 = *corollary51_rhs(in).rhs;
  BoundInputs doubled = in;
  doubled.k = 4;
  EXPECT_NEAR(c51, *corollary41_rhs(doubled).rhs, 1e-12);

  BoundInputs zero = in;
  zero.lambda = zero.tail1 = zero.tailp = 0.0;
  EXPECT_EQ(*corollary51_rhs(zero).rhs, 0.0);
  zero.approx_err = 0.5;
  zero.lambda = 1.0;  // below the floor raised by epsilon
  EXPECT_FALSE(corollary51_rhs(zero).rhs.has_value());
  zero.lambda = 3.0;
  const auto with_eps = corollary51_rhs(zero).rhs;
  ASSERT_TRUE(with_eps.has_value());
  EXPECT_NEAR(*with_eps, 4.0 * 0.5 + 8.0 * 1.4 / 0.6 * std::sqrt(4.0) * 3.0, 1e-12);
}

TEST(Corollary61, IdentityGram) {
  auto in = identity_inputs(10, 2, 3, 2);
  in.lambda = 0.2;
  const auto r = corollary61_rhs(in);
  ASSERT_TRUE(r.rhs.has_value());
  EXPECT_NEAR(*r.rhs, 8.0 * std::sqrt(2.0) * 0.2, 1e-12);
  in.lambda = 0.0;
  EXPECT_EQ(*corollary61_rhs(in).rhs, 0.0);
}

TEST(Dantzig, ConstantsAtOrigin) {
  const double c0 = 4.0 * std::sqrt(2.0) + 1.0 + 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(dantzig_c0(0.0, 0.0), c0, 1e-10);
  EXPECT_NEAR(dantzig_c0(0.0, 0.0), 7.3640, 1e-4);
  EXPECT_NEAR(dantzig_c2(0.0, 0.0), 2.0 * c0 + 1.0, 1e-10);
}

TEST(Dantzig, C2MonotoneOnGrid) {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double a = 0.045 * i, b = 0.045 * j;
      const double c = dantzig_c2(a, b);
      if (i > 0) { EXPECT_GT(c, dantzig_c2(a - 0.045, b)); }
      if (j > 0) { EXPECT_GT(c, dantzig_c2(a, b - 0.045)); }
    }
  }
}

TEST(Dantzig, C2BlowsUpAtBoundary) {
  const double a = 0.2;
  double previous = 0.0;
  for (double gap : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const double c = dantzig_c2(a, 1.0 - a - gap);
    EXPECT_GT(c, previous);
    previous = c;
  }
  EXPECT_GT(previous, 1e9);
  EXPECT_THROW(dantzig_c2(0.5, 0.5), Error);
}

TEST(Dantzig, LambdaLimit) {
  const std::size_t d = 500;
  const double ln_d = std::log(500.0);
  const double limit = std::sqrt(2.0 * ln_d) * std::sqrt(1.0 - std::log(std::sqrt(std::numbers::pi * ln_d)) / ln_d);
  EXPECT_NEAR(dantzig_lambda(d, 1.0, 1e12), limit, 1e-9);
  EXPECT_THROW(dantzig_constants(d, 0.05, 0.5, 0.3, 0.3), Error);
}

TEST(Theorem61, IdentityRhs) {
  auto in = identity_inputs(12, 3, 3, 3);
  in.sigma = 1.0;
  in.tail2 = 0.0;
  in.t_d = 0.5;
  const auto r = theorem61_rhs(in);
  ASSERT_TRUE(r.rhs.has_value());
  const double lam = dantzig_lambda(12, in.delta, 0.5);
  const double c2 = dantzig_c2(0.0, 0.0);
  EXPECT_NEAR(*r.rhs, std::sqrt(c2 * lam * lam * 4.0 / 100.0), 1e-10);
}

TEST(Theorem71, IdentityBothRoutes) {
  auto in = identity_inputs(10, 2, 3, 2);
  in.lambda = 0.01;
  in.alpha = 5.0;
  in.t = 0.5;
  const auto r = theorem71_conditions(in);
  EXPECT_TRUE(r.conditions_hold());
  ASSERT_EQ(r.alternatives.size(), 4u);
  for (const auto& c : r.alternatives) EXPECT_TRUE(c.holds) << c.text;
  EXPECT_NEAR(*r.rhs, in.epsilon_fs * in.alpha, 1e-15);
}

TEST(Theorem71, SmallAlphaFails) {
  auto in = identity_inputs(10, 2, 3, 2);
  in.lambda = 0.01;
  in.alpha = 1e-6;
  const auto r = theorem71_conditions(in);
  EXPECT_FALSE(r.conditions_hold());
  EXPECT_FALSE(r.rhs.has_value());
}

TEST(Corollary71, IncoherentSpecialization) {
  BoundInputs in;
  in.n = 400;
  in.d = 30;
  in.k = 2;
  in.coherence = 0.1;
  in.sigma = 0.05;
  in.delta = 0.05;
  in.lambda = 12.0 * in.sigma * hand_noise_rate(30, 0.05, 400);
  in.alpha = 40.0 * in.lambda;
  const auto r = corollary71_conditions(in);
  EXPECT_TRUE(r.conditions_hold());
  EXPECT_NEAR(*r.rhs, 32.0 * in.lambda, 1e-12);
  in.coherence = 0.2;  // k M = 0.4
  EXPECT_FALSE(corollary71_conditions(in).conditions_hold());
}

TEST(Theorem81, DimensionFreeRateAtQEqualsK) {
  auto in = identity_inputs(8, 2, 2, 2);
  in.sigma = 0.01;
  in.alpha = 10.0;
  in.lambda = 0.05;
  in.t = 0.5;
  in.q = 2;
  const auto r = theorem81_rhs(in);
  ASSERT_TRUE(r.rhs.has_value()) << "conditions fail";
  const double expected = 8.0 / 0.5 * in.sigma * (1.0 + std::sqrt(20.0 * std::log(1.0 / 0.05))) * std::sqrt(2.0 / 100.0);
  EXPECT_NEAR(*r.rhs, expected, 1e-12);

  in.q = 0;
  const auto r0 = theorem81_rhs(in);
  ASSERT_TRUE(r0.rhs.has_value());
  EXPECT_NEAR(*r0.rhs, 8.0 / 0.5 * std::sqrt(2.0) * in.lambda, 1e-12);
}

TEST(Theorem81, RhsDoesNotDependOnDAtFixedLambda) {
  auto small = identity_inputs(8, 2, 2, 2);
  auto large = identity_inputs(9, 2, 2, 2);
  for (auto* in : {&small, &large}) {
    in->sigma = 0.01;
    in->alpha = 10.0;
    in->lambda = 0.05;
  }
  ASSERT_TRUE(small.quantities.contains(4, 2, NormIndex::two(), "pi"));
  EXPECT_DOUBLE_EQ(*theorem81_rhs(small).rhs, *theorem81_rhs(large).rhs);
}

TEST(Corollary81, PrintedForm) {
  BoundInputs in;
  in.n = 400;
  in.d = 30;
  in.k = 3;
  in.s = 3;
  in.q = 1;
  in.coherence = 0.05;
  in.sigma = 0.1;
  in.delta = 0.05;
  in.tail2 = 0.01;
  in.lambda = 12.0 * in.sigma * hand_noise_rate(30, 0.05, 400);
  in.alpha = 48.0 * in.lambda;
  const auto r = corollary81_rhs(in);
  ASSERT_TRUE(r.rhs.has_value());
  const double expected = 24.0 * std::sqrt(2.0) * in.lambda +
                          24.0 * 0.1 * (1.0 + std::sqrt(20.0 * 1.0 / 400.0 * std::log(20.0))) + 168.0 * 0.01;
  EXPECT_NEAR(*r.rhs, expected, 1e-12);
}

TEST(AllBounds, MonotoneInLambdaTailsAndSigma) {
  RandomStream rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto base = identity_inputs(12, 2, 3, 2);
    base.t = 0.5;
    base.t_d = 0.2;
    base.sigma = rng.uniform(0.0, 0.05);
    base.lambda = rng.uniform(0.5, 1.0);
    base.alpha = 200.0;
    base.tail1 = rng.uniform(0.0, 0.2);
    base.tailp = rng.uniform(0.0, 0.2);
    base.q = 1;
    base.approx_err = rng.uniform(0.0, 0.05);
    for (const auto& name : bound_names()) {
      if (name == "theorem71" || name == "corollary71") continue;
      const auto r0 = evaluate_bound(name, base);
      if (!r0.rhs) continue;
      EXPECT_GE(*r0.rhs, 0.0) << name;
      auto bump = [&](auto mutate, const char* what) {
        BoundInputs in = base;
        mutate(in);
        const auto r1 = evaluate_bound(name, in);
        if (r1.rhs) { EXPECT_GE(*r1.rhs, *r0.rhs - 1e-12) << name << " " << what; }
      };
      bump([](BoundInputs& in) { in.lambda *= 1.1; }, "lambda");
      bump([](BoundInputs& in) { in.tail1 += 0.05; }, "tail1");
      bump([](BoundInputs& in) { in.tailp += 0.05; }, "tailp");
      bump([](BoundInputs& in) { in.sigma += 0.01; }, "sigma");
    }
  }
}

TEST(AllBounds, ZeroWhenNothingToBound) {
  auto in = identity_inputs(12, 2, 3, 2);
  in.t_d = 0.2;
  in.q = 2;
  for (const auto& name : bound_names()) {
    // corollary51 needs 2k <= ell and has its own zero case
    if (name == "theorem71" || name == "corollary71" || name == "corollary51") continue;
    const auto r = evaluate_bound(name, in);
    ASSERT_TRUE(r.rhs.has_value()) << name;
    EXPECT_EQ(*r.rhs, 0.0) << name;
  }
}

TEST(AllBounds, RhsOnlyWhenEveryConditionHolds) {
  RandomStream rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    auto in = identity_inputs(12, 2, 3, 2);
    in.t = rng.uniform(0.05, 1.0);
    in.sigma = rng.uniform(0.0, 1.0);
    in.lambda = rng.uniform(0.0, 2.0);
    in.alpha = rng.uniform(0.01, 10.0);
    in.coherence = rng.uniform(0.0, 0.3);
    in.q = static_cast<std::size_t>(rng.below(3));
    for (const auto& name : bound_names()) {
      const auto r = evaluate_bound(name, in);
      EXPECT_EQ(r.rhs.has_value(), r.conditions_hold()) << name;
      for (const auto& c : r.conditions) {
        if (!c.holds) { EXPECT_FALSE(r.rhs.has_value()); }
      }
    }
  }
  EXPECT_THROW(evaluate_bound("theorem99", identity_inputs(12, 2, 3, 2)), Error);
}

TEST(QuantityTable, DirectionChecks) {
  QuantityTable t;
  t.set(3, 1, NormIndex::two(), "omega", Quantity{0.5, Exactness::LowerBound, false});
  t.set(3, 1, NormIndex::two(), "pi", Quantity{0.4, Exactness::UpperBound, false});
  t.set(3, 1, NormIndex::two(), "pi_lower", Quantity{0.3, Exactness::HeuristicLower, false});
  EXPECT_EQ(t.get(3, 1, NormIndex::two(), "omega", Need::Lower), 0.5);
  EXPECT_THROW(t.get(3, 1, NormIndex::two(), "omega", Need::Upper), Error);
  EXPECT_EQ(t.get(3, 1, NormIndex::two(), "pi", Need::Upper), 0.4);
  EXPECT_THROW(t.get(3, 1, NormIndex::two(), "pi_lower", Need::Upper), Error);
  EXPECT_THROW(t.get(3, 1, NormIndex::two(), "pi_lower", Need::Lower), Error);
  EXPECT_THROW(t.get(3, 2, NormIndex::two(), "pi", Need::Upper), Error);
}
