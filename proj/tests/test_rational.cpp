#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "sau/errors.hpp"
#include "sau/rational.hpp"

using sau::ParseError;
using sau::Rational;

TEST(Rational, ParseReducesAndPrints) {
  EXPECT_EQ(Rational::parse("6/8").str(), "3/4");
  EXPECT_EQ(Rational::parse("-10/5").str(), "-2");
  EXPECT_EQ(Rational::parse("0/7").str(), "0");
  EXPECT_EQ(Rational::parse("123456789012345678901234567890").str(), "123456789012345678901234567890");
  EXPECT_EQ(Rational::parse("2/1"), Rational(2));
}

TEST(Rational, ParseRejectsMalformed) {
  for (const char* bad : {"", "-", "1/", "/2", "1/0", "1.5", "+3", "1/-2", "a", "1 /2", "1/2/3"}) {
    EXPECT_THROW(Rational::parse(bad), ParseError) << bad;
  }
}

TEST(Rational, Arithmetic) {
  const Rational a(1, 3);
  const Rational b(1, 6);
  EXPECT_EQ(a + b, Rational(1, 2));
  EXPECT_EQ(a - b, Rational(1, 6));
  EXPECT_EQ(a * b, Rational(1, 18));
  EXPECT_EQ(a / b, Rational(2));
  EXPECT_EQ(-a, Rational(-1, 3));
  EXPECT_LT(b, a);
  EXPECT_EQ(abs(Rational(-5, 7)), Rational(5, 7));
  EXPECT_THROW(a / Rational(0), sau::DomainError);
}

TEST(Rational, FromDoubleIsExact) {
  EXPECT_EQ(Rational::from_double(0.5), Rational(1, 2));
  EXPECT_EQ(Rational::from_double(-0.375), Rational(-3, 8));
  const double third = 1.0 / 3.0;
  const Rational r = Rational::from_double(third);
  EXPECT_EQ(r.to_double(), third);
  EXPECT_NE(r, Rational(1, 3));
  EXPECT_TRUE(r.denominator() == mpz_class(1) << 54);
  EXPECT_THROW(Rational::from_double(std::numeric_limits<double>::infinity()), sau::DomainError);
}

TEST(Rational, Pow2) {
  EXPECT_EQ(Rational::pow2(0), Rational(1));
  EXPECT_EQ(Rational::pow2(3), Rational(8));
  EXPECT_EQ(Rational::pow2(-4), Rational(1, 16));
}

TEST(Rational, Streams) {
  std::ostringstream s;
  s << Rational(-7, 21);
  EXPECT_EQ(s.str(), "-1/3");
}
