#pragma once

#include <string>
#include <vector>

#include "apx/rational.hpp"

namespace apx {

/// Closed interval [lo, hi] with exact rational endpoints.
///
/// Results of arithmetic on non-degenerate operands are rounded outward to
/// the grid 2^-kEnclosureBits so that denominators stay bounded. When every
/// operand is a single point the result is computed exactly.
class Interval {
 public:
  static constexpr unsigned kEnclosureBits = 48;

  Interval() = default;
  Interval(Rational point) : lo_(point), hi_(std::move(point)) {}  // NOLINT(google-explicit-constructor)
  Interval(int point) : Interval(Rational(point)) {}                 // NOLINT(google-explicit-constructor)
  Interval(Rational lo, Rational hi);

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  bool is_point() const { return lo_ == hi_; }
  bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  Rational width() const { return hi_ - lo_; }
  Rational mid() const { return (lo_ + hi_) / 2; }
  std::string str() const;

  /// [lo, hi] rounded outward to the enclosure grid.
  static Interval outward(Rational lo, Rational hi);

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a);
  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  Rational lo_;
  Rational hi_;
};

/// x^2 as a single operation (tighter than x * x when 0 is inside x).
Interval sqr(const Interval& x);
/// max(x, 0).
Interval positive_part(const Interval& x);
Interval min(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);
/// Range of the middle value of three numbers drawn from a, b, c.
Interval median(const Interval& a, const Interval& b, const Interval& c);

}  // namespace apx
