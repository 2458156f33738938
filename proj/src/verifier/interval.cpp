#include "apx/interval.hpp"

#include <algorithm>
#include <array>

namespace apx {

Interval::Interval(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (hi_ < lo_) throw DomainError("interval with lo > hi: [" + lo_.str() + ", " + hi_.str() + "]");
}

Interval Interval::outward(Rational lo, Rational hi) {
  Interval r;
  r.lo_ = round_down(lo, kEnclosureBits);
  r.hi_ = round_up(hi, kEnclosureBits);
  return r;
}

std::string Interval::str() const { return "[" + lo_.str() + ", " + hi_.str() + "]"; }

Interval operator+(const Interval& a, const Interval& b) {
  if (a.is_point() && b.is_point()) return Interval(a.lo_ + b.lo_);
  return Interval::outward(a.lo_ + b.lo_, a.hi_ + b.hi_);
}

Interval operator-(const Interval& a, const Interval& b) {
  if (a.is_point() && b.is_point()) return Interval(a.lo_ - b.lo_);
  return Interval::outward(a.lo_ - b.hi_, a.hi_ - b.lo_);
}

Interval operator-(const Interval& a) {
  Interval r;
  r.lo_ = -a.hi_;
  r.hi_ = -a.lo_;
  return r;
}

Interval operator*(const Interval& a, const Interval& b) {
  if (a.is_point() && b.is_point()) return Interval(a.lo_ * b.lo_);
  std::array<Rational, 4> p{a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  return Interval::outward(*lo, *hi);
}

Interval sqr(const Interval& x) {
  if (x.is_point()) return Interval(x.lo() * x.lo());
  const Rational a = x.lo() * x.lo();
  const Rational b = x.hi() * x.hi();
  if (x.lo().sign() >= 0) return Interval::outward(a, b);
  if (x.hi().sign() <= 0) return Interval::outward(b, a);
  return Interval::outward(Rational(0), max(a, b));
}

Interval positive_part(const Interval& x) {
  if (x.lo().sign() >= 0) return x;
  if (x.hi().sign() <= 0) return Interval(0);
  return Interval(Rational(0), x.hi());
}

Interval min(const Interval& a, const Interval& b) { return Interval(min(a.lo(), b.lo()), min(a.hi(), b.hi())); }
Interval max(const Interval& a, const Interval& b) { return Interval(max(a.lo(), b.lo()), max(a.hi(), b.hi())); }
Interval hull(const Interval& a, const Interval& b) { return Interval(min(a.lo(), b.lo()), max(a.hi(), b.hi())); }

Interval median(const Interval& a, const Interval& b, const Interval& c) {
  auto med = [](Rational x, Rational y, Rational z) {
    if (y < x) std::swap(x, y);
    if (z < y) std::swap(y, z);
    if (y < x) std::swap(x, y);
    return y;
  };
  return Interval(med(a.lo(), b.lo(), c.lo()), med(a.hi(), b.hi(), c.hi()));
}

}  // namespace apx
