#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sau/errors.hpp"
#include "sau/pursuit.hpp"
#include "test_support.hpp"

using namespace sau;
using sau::testing::oracle_integral;
using sau::testing::q;
using sau::testing::step;

namespace {

// Least N with sum_{k<=N} eps^4 / (A + sqrt(k-1) B)^2 > B^2, by direct long double summation.
std::uint64_t oracle_series_index(long double b_sq, long double a_inf, long double eps) {
  const long double b = std::sqrt(b_sq);
  const long double e4 = eps * eps * eps * eps;
  long double sum = 0;
  std::uint64_t k = 0;
  while (sum <= b_sq) {
    ++k;
    const long double d = a_inf + std::sqrt(static_cast<long double>(k - 1)) * b;
    sum += e4 / (d * d);
  }
  return k;
}

std::uint64_t with_safety(std::uint64_t n) {
  return static_cast<std::uint64_t>(std::ceil(kIterationBoundSafety * static_cast<long double>(n)));
}

void expect_certified(const StepFn& a, const OrthoFamily& fam, const PursuitResult& res) {
  const CertificateReport cert = certify_pursuit(a, fam, res);
  const Check* bad = cert.first_failure();
  EXPECT_EQ(bad, nullptr) << bad->name << ": " << bad->witness;
}

}  // namespace

TEST(Pursue, RademacherInOneStep) {
  const StepFn r = sau::testing::rademacher1();
  const PursuitResult res = pursue(r, OrthoFamily(), q(1, 2));
  ASSERT_EQ(res.trace.iterations.size(), 1u);
  EXPECT_EQ(res.trace.iterations[0].unit.fn(), r);
  EXPECT_EQ(res.trace.iterations[0].alpha, q(1));
  EXPECT_TRUE(res.residual.is_zero());
  expect_certified(r, OrthoFamily(), res);
}

TEST(Pursue, SmallResidualNeedsNoSteps) {
  const StepFn a = StepFn::constant(3) + q(1, 8) * sau::testing::rademacher1();
  const PursuitResult res = pursue(a, OrthoFamily(), q(1, 4));
  EXPECT_TRUE(res.trace.iterations.empty());
  EXPECT_TRUE(res.units().empty());
  EXPECT_EQ(res.trace.iteration_bound, 0u);
  EXPECT_EQ(res.projection_coeffs, (std::vector<Rational>{q(3)}));
  expect_certified(a, OrthoFamily(), res);
}

TEST(Pursue, ThreeLevelFirstStep) {
  const StepFn a = step({q(0), q(1, 3), q(2, 3), q(1)}, {q(1), q(0), q(-1)});
  const PursuitResult res = pursue(a, OrthoFamily(), q(1, 2));
  ASSERT_GE(res.trace.iterations.size(), 1u);
  const PursuitStep& s = res.trace.iterations.front();
  EXPECT_EQ(s.alpha, q(2, 3));
  EXPECT_EQ(s.unit.fn(), sau::testing::rademacher1());
  EXPECT_EQ(res.trace.norm2_sq_initial, Rational(oracle_integral(a, a)));
  EXPECT_EQ(res.trace.norm2_sq_initial, q(2, 3));
  EXPECT_EQ(s.norm2_sq_after, q(2, 9));
  EXPECT_EQ(s.norm2_sq_after, q(2, 3) - q(2, 3) * q(2, 3));
  expect_certified(a, OrthoFamily(), res);
}

TEST(Pursue, Preconditions) {
  const StepFn r = sau::testing::rademacher1();
  EXPECT_THROW(pursue(r, OrthoFamily(), q(0)), DomainError);
  EXPECT_THROW(pursue(r, OrthoFamily(), q(-1, 2)), DomainError);
}

TEST(Pursue, CeilingAbort) {
  const StepFn a = step({q(0), q(1, 3), q(2, 3), q(1)}, {q(1), q(0), q(-1)});
  PursuitOptions opts;
  opts.lyapunov.cell_ceiling = 2;
  EXPECT_THROW(pursue(a, OrthoFamily(), q(1, 8), opts), CeilingError);
}

TEST(Pursue, RandomTargetsAreCertified) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    OrthoFamily fam;
    if (trial % 2) fam.append(sau::testing::rademacher1());
    const StepFn a = sau::testing::random_step(rng, 2 + trial % 4, 4, 4);
    const Rational eps = trial % 3 ? q(1, 2) : q(1, 4);
    std::size_t seen = 0;
    PursuitOptions opts;
    opts.on_step = [&](const PursuitStep& s) { EXPECT_EQ(s.k, ++seen); };
    const PursuitResult res = pursue(a, fam, eps, opts);
    EXPECT_EQ(seen, res.trace.iterations.size());
    EXPECT_LT(norm2_sq(res.residual), eps * eps);
    EXPECT_LE(res.trace.iterations.size(), res.trace.iteration_bound);
    expect_certified(a, fam, res);
  }
}

TEST(Certificate, DetectsTamperedTrace) {
  const StepFn a = step({q(0), q(1, 3), q(2, 3), q(1)}, {q(1), q(0), q(-1)});
  PursuitResult res = pursue(a, OrthoFamily(), q(1, 2));
  res.trace.iterations.front().alpha += q(1, 1000);
  const CertificateReport cert = certify_pursuit(a, OrthoFamily(), res);
  ASSERT_FALSE(cert.pass());
  EXPECT_EQ(cert.first_failure()->name, "norming identity");
}

TEST(IterationBound, ZeroWhenAlreadySmall) {
  EXPECT_EQ(iteration_bound(q(1, 8), q(1), q(1, 2)), 0u);
  EXPECT_EQ(iteration_bound(q(1, 4), q(1, 2), q(3, 4)), 0u);
}

TEST(IterationBound, RejectsNonPositive) {
  EXPECT_THROW(iteration_bound(q(0), q(1), q(1, 2)), DomainError);
  EXPECT_THROW(iteration_bound(q(1), q(-1), q(1, 2)), DomainError);
  EXPECT_THROW(iteration_bound(q(1), q(1), q(0)), DomainError);
}

TEST(IterationBound, UnitNormsHalfEpsilonMatchesSeriesOracle) {
  const std::uint64_t n = oracle_series_index(1.0L, 1.0L, 0.5L);
  EXPECT_GE(n, 1'000'000u);
  EXPECT_LT(n, 100'000'000u);
  const std::uint64_t got = iteration_bound(q(1), q(1), q(1, 2));
  EXPECT_NEAR(static_cast<double>(got), static_cast<double>(with_safety(n)), 2.0);
}

TEST(IterationBound, SmallCasesMatchSeriesOracle) {
  struct Case {
    Rational b_sq, a_inf, eps;
  };
  for (const Case& c : {Case{q(1, 4), q(1, 2), q(1, 2)}, Case{q(1, 4), q(1), q(1, 4)}, Case{q(2), q(3), q(1)},
                        Case{q(1), q(1), q(1)}, Case{q(9, 16), q(3, 2), q(1, 2)}}) {
    const std::uint64_t n = oracle_series_index(c.b_sq.to_double(), c.a_inf.to_double(), c.eps.to_double());
    EXPECT_NEAR(static_cast<double>(iteration_bound(c.b_sq, c.a_inf, c.eps)), static_cast<double>(with_safety(n)), 2.0)
        << c.b_sq << " " << c.a_inf << " " << c.eps;
  }
}

TEST(IterationBound, SaturatesForTinyEpsilon) {
  EXPECT_EQ(iteration_bound(q(1), q(1), q(1, 64)), kBoundSaturated);
}

TEST(IterationBound, MonotoneInEpsilon) {
  std::uint64_t prev = 0;
  for (long d : {1, 2, 3, 4}) {
    const std::uint64_t n = iteration_bound(q(1), q(1), Rational(4, 4 + d));
    EXPECT_GE(n, prev);
    prev = n;
  }
}
