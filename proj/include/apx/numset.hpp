#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apx/rational.hpp"

namespace apx {

/// Finite set of exact rationals, stored strictly increasing.
class NumSet {
 public:
  NumSet() = default;
  /// Sorts and deduplicates.
  explicit NumSet(std::vector<Rational> elements);
  NumSet(std::initializer_list<Rational> elements) : NumSet(std::vector<Rational>(elements)) {}

  static NumSet from_integers(std::span<const long> values);
  static NumSet from_integers(std::initializer_list<long> values);

  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  const Rational& operator[](std::size_t i) const { return elems_[i]; }
  const Rational& min() const;
  const Rational& max() const;
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  const std::vector<Rational>& elements() const { return elems_; }

  bool contains(const Rational& x) const;
  bool all_integers() const;

  friend bool operator==(const NumSet&, const NumSet&) = default;

 private:
  std::vector<Rational> elems_;
};

NumSet set_union(const NumSet& a, const NumSet& b);
NumSet set_intersection(const NumSet& a, const NumSet& b);

/// x -> scale * x + shift, scale nonzero.
class AffineMap {
 public:
  AffineMap(Rational scale, Rational shift);
  const Rational& scale() const { return scale_; }
  const Rational& shift() const { return shift_; }
  Rational operator()(const Rational& x) const { return scale_ * x + shift_; }

 private:
  Rational scale_;
  Rational shift_;
};

/// Parses a set document: one token per line (with `#` comments, LF or CRLF),
/// or a single bracketed comma-separated list such as "[1, 2, 5/3]".
NumSet parse_set(std::string_view text);
NumSet read_set_file(const std::string& path);
/// One element per line, in increasing order.
std::string format_set(const NumSet& s);

NumSet affine_image(const NumSet& s, const AffineMap& m);
NumSet negate(const NumSet& s);
/// True iff s and -s are disjoint (so in particular 0 is not in s).
bool is_antisymmetric(const NumSet& s);

/// (min + max) / 2; DomainError on the empty set.
Rational midpoint(const NumSet& s);

/// Dilates every set by the least common denominator of all elements, which
/// maps them to integer sets while preserving every homogeneous linear
/// equation count.
struct IntegerImage {
  std::vector<NumSet> sets;
  Rational scale;
};
IntegerImage to_integer_sets(std::span<const NumSet> sets);

}  // namespace apx
