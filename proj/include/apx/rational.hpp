#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace apx {

/// Malformed numeric text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::invalid_argument(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A precondition on mathematical input was violated.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exact rational number in canonical form (gcd(num, den) = 1, den > 0).
///
/// Thin value wrapper over GMP's mpq_class. Every result is materialized, so
/// the type behaves like a plain arithmetic value in generic code.
class Rational {
 public:
  Rational() = default;
  Rational(int v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(unsigned long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(const mpz_class& num, const mpz_class& den);
  Rational(long num, long den);
  explicit Rational(const mpz_class& z) : q_(z) {}
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  /// Exact value of a finite double (doubles are dyadic rationals).
  static Rational from_double(double d);

  /// Parses an integer `-?[0-9]+`, a decimal `-?[0-9]+\.[0-9]+`, or a
  /// fraction `-?[0-9]+/[1-9][0-9]*`. Decimals are converted exactly.
  static Rational parse(std::string_view token);

  mpz_class num() const { return q_.get_num(); }
  mpz_class den() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }
  mpq_class& raw() { return q_; }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  double to_double() const { return q_.get_d(); }

  /// "p" for integers, "p/q" otherwise.
  std::string str() const;

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
  friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
  friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
  friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }
  friend Rational operator-(Rational a) { mpq_neg(a.q_.get_mpq_t(), a.q_.get_mpq_t()); return a; }

  friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_.get_mpq_t(), b.q_.get_mpq_t()) != 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class q_;
};

Rational abs(const Rational& x);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);
/// Multiplies by 2^k (k may be negative).
Rational mul_2exp(const Rational& x, long k);
mpz_class floor(const Rational& x);
mpz_class ceil(const Rational& x);

/// Largest p/2^bits <= x, and smallest p/2^bits >= x. Identity when the
/// denominator already divides 2^bits.
Rational round_down(const Rational& x, unsigned bits);
Rational round_up(const Rational& x, unsigned bits);

struct RationalHash {
  std::size_t operator()(const Rational& r) const noexcept;
};

/// Converts to int64; throws DomainError when the value is not an integer in range.
std::int64_t to_int64(const Rational& r);
std::int64_t to_int64(const mpz_class& z);

}  // namespace apx
