#include <gtest/gtest.h>

#include "sau/errors.hpp"
#include "sau/ortho_family.hpp"
#include "test_support.hpp"

using namespace sau;
using sau::testing::q;
using sau::testing::step;

TEST(OrthoFamily, DefaultIsConstantOne) {
  const OrthoFamily fam;
  ASSERT_EQ(fam.size(), 1u);
  EXPECT_EQ(fam[0], StepFn::constant(1));
}

TEST(OrthoFamily, RejectsNonOrthonormal) {
  EXPECT_THROW(OrthoFamily::from_members({StepFn::constant(1), StepFn::indicator(q(0), q(1, 2))}), InputError);
  EXPECT_THROW(OrthoFamily::from_members({sau::testing::rademacher1()}), InputError);
  OrthoFamily fam;
  EXPECT_THROW(fam.append(StepFn::constant(1)), InputError);
  EXPECT_THROW(fam.append(step({q(0), q(1, 2), q(1)}, {q(2), q(-2)})), InputError);
  fam.append(sau::testing::rademacher1());
  EXPECT_EQ(fam.size(), 2u);
}

TEST(Projection, ConstantProjectsToItself) {
  const Projection p = project_residual(StepFn::constant(1), OrthoFamily());
  EXPECT_EQ(p.coeffs, (std::vector<Rational>{q(1)}));
  EXPECT_TRUE(p.residual.is_zero());
}

TEST(Projection, OrthogonalInputUnchanged) {
  const StepFn a = step({q(0), q(1, 3), q(1)}, {q(2), q(-1)});
  const Projection p = project_residual(a, OrthoFamily());
  EXPECT_EQ(p.coeffs, (std::vector<Rational>{q(0)}));
  EXPECT_EQ(p.residual, a);
}

TEST(Projection, HalfIndicator) {
  const StepFn a = StepFn::indicator(q(0), q(1, 2));
  const Projection p = project_residual(a, OrthoFamily());
  EXPECT_EQ(p.coeffs.front(), Rational(sau::testing::oracle_integral(a)));
  EXPECT_EQ(p.coeffs.front(), q(1, 2));
  EXPECT_EQ(p.residual, step({q(0), q(1, 2), q(1)}, {q(1, 2), q(-1, 2)}));
}

TEST(Projection, RandomResidualsAreOrthogonal) {
  std::mt19937_64 rng(5);
  OrthoFamily fam;
  fam.append(sau::testing::rademacher1());
  fam.append(step({q(0), q(1, 4), q(1, 2), q(3, 4), q(1)}, {q(1), q(-1), q(-1), q(1)}));
  for (int trial = 0; trial < 50; ++trial) {
    const StepFn a = sau::testing::random_step(rng, 6);
    const Projection p = project_residual(a, fam);
    for (const StepFn& e : fam.members()) EXPECT_EQ(inner(p.residual, e), q(0));
    EXPECT_EQ(expand(p.coeffs, fam.members()) + p.residual, a);
  }
}
