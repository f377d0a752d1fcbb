#pragma once

#include <compare>
#include <concepts>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace sau {

// Exact rational number backed by GMP. Always in lowest terms with a positive
// denominator; text form is "p/q", or "p" when q = 1.
class Rational {
 public:
  Rational() = default;

  template <std::signed_integral T>
  Rational(T n) : value_(static_cast<long>(n)) {}  // NOLINT(google-explicit-constructor)

  template <std::unsigned_integral T>
  Rational(T n) : value_(static_cast<unsigned long>(n)) {}  // NOLINT(google-explicit-constructor)

  Rational(long num, long den);

  explicit Rational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }

  // Accepts an optional '-', decimal digits, and an optional "/digits" part.
  // Non-reduced input is reduced. Throws ParseError.
  static Rational parse(std::string_view text);

  // Exact value of a finite double (every double is a dyadic rational).
  static Rational from_double(double x);

  // 2^e for any integer e.
  static Rational pow2(long e);

  std::string str() const;
  double to_double() const { return value_.get_d(); }

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  const mpq_class& raw() const { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }

  // Bits needed for numerator plus denominator; a size measure for diagnostics.
  std::size_t bit_size() const;

  Rational operator-() const { return Rational(mpq_class(-value_)); }

  Rational& operator+=(const Rational& o) {
    value_ += o.value_;
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    value_ -= o.value_;
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    value_ *= o.value_;
    return *this;
  }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  mpq_class value_;
};

Rational abs(const Rational& x);

std::ostream& operator<<(std::ostream& os, const Rational& x);

}  // namespace sau
