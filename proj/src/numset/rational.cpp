#include "apx/rational.hpp"

#include <cmath>
#include <limits>

namespace apx {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

mpz_class digits_to_mpz(std::string_view s) { return mpz_class(std::string(s), 10); }

}  // namespace

Rational::Rational(const mpz_class& num, const mpz_class& den) : q_(num, den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  q_.canonicalize();
}

Rational::Rational(long num, long den) : q_(num, den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  q_.canonicalize();
}

Rational Rational::from_double(double d) {
  if (!std::isfinite(d)) throw DomainError("non-finite double has no rational value");
  Rational r;
  mpq_set_d(r.q_.get_mpq_t(), d);
  return r;
}

Rational Rational::parse(std::string_view token) {
  const std::string_view original = token;
  bool negative = false;
  if (!token.empty() && token.front() == '-') {
    negative = true;
    token.remove_prefix(1);
  }
  Rational out;
  if (auto slash = token.find('/'); slash != std::string_view::npos) {
    const auto n = token.substr(0, slash);
    const auto d = token.substr(slash + 1);
    if (!all_digits(n) || !all_digits(d) || d.front() == '0')
      throw ParseError("malformed fraction '" + std::string(original) + "'");
    out = Rational(digits_to_mpz(n), digits_to_mpz(d));
  } else if (auto dot = token.find('.'); dot != std::string_view::npos) {
    const auto ip = token.substr(0, dot);
    const auto fp = token.substr(dot + 1);
    if (!all_digits(ip) || !all_digits(fp))
      throw ParseError("malformed decimal '" + std::string(original) + "'");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    out = Rational(digits_to_mpz(ip) * scale + digits_to_mpz(fp), scale);
  } else {
    if (!all_digits(token)) throw ParseError("malformed number '" + std::string(original) + "'");
    out = Rational(digits_to_mpz(token));
  }
  return negative ? -out : out;
}

std::string Rational::str() const {
  if (is_integer()) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DomainError("division by zero");
  q_ /= o.q_;
  return *this;
}

Rational abs(const Rational& x) { return x.sign() < 0 ? -x : x; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational mul_2exp(const Rational& x, long k) {
  Rational r = x;
  if (k >= 0)
    mpq_mul_2exp(r.raw().get_mpq_t(), x.raw().get_mpq_t(), static_cast<mp_bitcnt_t>(k));
  else
    mpq_div_2exp(r.raw().get_mpq_t(), x.raw().get_mpq_t(), static_cast<mp_bitcnt_t>(-k));
  return r;
}

mpz_class floor(const Rational& x) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), x.raw().get_num_mpz_t(), x.raw().get_den_mpz_t());
  return r;
}

mpz_class ceil(const Rational& x) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), x.raw().get_num_mpz_t(), x.raw().get_den_mpz_t());
  return r;
}

namespace {

bool den_divides_pow2(const Rational& x, unsigned bits) {
  const mpz_class& d = x.raw().get_den();
  if (d == 1) return true;
  const mp_bitcnt_t tz = mpz_scan1(d.get_mpz_t(), 0);
  return tz <= bits && mpz_sizeinbase(d.get_mpz_t(), 2) == tz + 1;
}

}  // namespace

Rational round_down(const Rational& x, unsigned bits) {
  if (den_divides_pow2(x, bits)) return x;
  return mul_2exp(Rational(floor(mul_2exp(x, bits))), -static_cast<long>(bits));
}

Rational round_up(const Rational& x, unsigned bits) {
  if (den_divides_pow2(x, bits)) return x;
  return mul_2exp(Rational(ceil(mul_2exp(x, bits))), -static_cast<long>(bits));
}

std::size_t RationalHash::operator()(const Rational& r) const noexcept {
  const mpq_srcptr q = r.raw().get_mpq_t();
  std::size_t h = static_cast<std::size_t>(mpz_get_ui(mpq_numref(q))) * 0x9E3779B97F4A7C15ULL;
  h ^= static_cast<std::size_t>(mpz_sgn(mpq_numref(q)) + 1) << 1;
  h ^= static_cast<std::size_t>(mpz_get_ui(mpq_denref(q))) + 0x7F4A7C15ULL + (h << 6) + (h >> 2);
  return h;
}

std::int64_t to_int64(const mpz_class& z) {
  if (!mpz_fits_slong_p(z.get_mpz_t())) throw DomainError("integer out of 64-bit range: " + z.get_str());
  return static_cast<std::int64_t>(mpz_get_si(z.get_mpz_t()));
}

std::int64_t to_int64(const Rational& r) {
  if (!r.is_integer()) throw DomainError("expected an integer, got " + r.str());
  return to_int64(r.raw().get_num());
}

}  // namespace apx
