#include <gtest/gtest.h>

#include <random>

#include "sau/errors.hpp"
#include "sau/serialize.hpp"
#include "test_support.hpp"

using namespace sau;
using sau::testing::q;
using sau::testing::step;

TEST(Serialize, RationalsAreStrings) {
  EXPECT_EQ(io::to_json(q(-3, 4)).dump(), "\"-3/4\"");
  EXPECT_EQ(io::rational_from_json(io::Json("6/8")), q(3, 4));
  EXPECT_THROW(io::rational_from_json(io::Json(0.5)), ParseError);
  EXPECT_THROW(io::rational_from_json(io::Json("1/0")), ParseError);
}

TEST(Serialize, StepFunctionRoundTrip) {
  const StepFn f = step({q(0), q(1, 3), q(1)}, {q(2, 7), q(-5)});
  const io::Json j = io::to_json(f);
  EXPECT_EQ(j.dump(), R"({"breakpoints":["0","1/3","1"],"values":["2/7","-5"]})");
  EXPECT_EQ(io::step_from_json(j), f);
}

TEST(Serialize, MalformedStepFunction) {
  EXPECT_THROW(io::step_from_json(io::parse(R"({"breakpoints":["0","1"]})")), ParseError);
  EXPECT_THROW(io::step_from_json(io::parse(R"({"breakpoints":["0","1/2"],"values":["1"]})")), ParseError);
  EXPECT_THROW(io::step_from_json(io::parse(R"({"breakpoints":["0","1"],"values":[1]})")), ParseError);
  EXPECT_THROW(io::parse("{"), ParseError);
}

TEST(Serialize, BasisFileIsByteStable) {
  const BasisState s = run_stages(20);
  const std::string text = io::dump(io::to_json(s));
  const BasisState back = io::basis_from_json(io::parse(text));
  EXPECT_EQ(back, s);
  EXPECT_EQ(io::dump(io::to_json(back)), text);
  EXPECT_EQ(io::model_of(io::parse(text)), "abelian");
}

TEST(Serialize, BasisFileRejectsWrongModel) {
  const std::string text = io::dump(io::to_json(bundle::nc_run_stages(1, 2)));
  EXPECT_THROW(io::basis_from_json(io::parse(text)), ParseError);
  EXPECT_THROW(io::model_of(io::parse("[1,2]")), ParseError);
}

TEST(Serialize, PursuitTrace) {
  const PursuitResult r = pursue(sau::testing::rademacher1(), OrthoFamily(), q(1, 2));
  const io::Json j = io::to_json(r);
  EXPECT_EQ(j.at("epsilon"), "1/2");
  ASSERT_EQ(j.at("iterations").size(), 1u);
  EXPECT_EQ(j.at("iterations")[0].at("alpha"), "1");
  EXPECT_EQ(io::step_from_json(j.at("iterations")[0].at("unit")), sau::testing::rademacher1());
  EXPECT_EQ(j.at("iteration_bound_saturated"), false);
}

TEST(Serialize, VerifyReportCarriesWitnesses) {
  BasisState s = run_stages(6);
  std::vector<StepFn> m = s.family.members();
  m[1] = step({q(0), q(1, 2), q(1)}, {q(2), q(-1)});
  s.family = OrthoFamily::assume_orthonormal(m);
  const io::Json j = io::to_json(verify_basis(s, 4, 4));
  EXPECT_EQ(j.at("pass"), false);
  EXPECT_EQ(j.at("value_witnesses")[0].at("member"), 1);
  EXPECT_EQ(j.at("value_witnesses")[0].at("cell"), 0);
  EXPECT_EQ(j.at("value_witnesses")[0].at("value"), "2");
  bool saw_uncertified = false;
  for (const auto& p : j.at("pairs")) saw_uncertified |= p.at("status") == "not certified";
  EXPECT_TRUE(saw_uncertified);
}

TEST(Serialize, MatrixBundleDoublesRoundTripExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  bundle::Matrix m(3, 3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) m(i, k) = bundle::Complex(d(rng), d(rng));
  }
  const bundle::MatStepFn f = bundle::MatStepFn::from_cells({q(0), q(1, 9), q(1)}, {m, m.adjoint()});
  const std::string text = io::dump(io::to_json(f));
  const bundle::MatStepFn back = io::mat_step_from_json(io::parse(text));
  EXPECT_TRUE(back == f);
  EXPECT_EQ(io::dump(io::to_json(back)), text);
}

TEST(Serialize, MatrixBasisRoundTrip) {
  const bundle::NcBasisState s = bundle::nc_run_stages(2, 8);
  const std::string text = io::dump(io::to_json(s));
  const bundle::NcBasisState back = io::nc_basis_from_json(io::parse(text));
  EXPECT_EQ(back.n, 2u);
  ASSERT_EQ(back.family.size(), s.family.size());
  for (std::size_t i = 0; i < s.family.size(); ++i) EXPECT_TRUE(back.family[i] == s.family[i]);
  EXPECT_EQ(back.processed, s.processed);
  EXPECT_EQ(io::dump(io::to_json(back)), text);
}

TEST(Serialize, MalformedMatrix) {
  EXPECT_THROW(io::matrix_from_json(io::parse("[[[1,0],[0,0]]]")), ParseError);
  EXPECT_THROW(io::matrix_from_json(io::parse("[[1]]")), ParseError);
  EXPECT_THROW(io::matrix_from_json(io::parse("[]")), ParseError);
}
