// Brute-force oracles and small random generators shared by the test suites.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "apx/counting.hpp"
#include "apx/numset.hpp"
#include "apx/rational.hpp"

namespace testing_support {

using apx::NumSet;
using apx::Rational;

/// Triple loop over A x B x C; the equation is restated here independently.
inline std::uint64_t naive_count(const NumSet& a, const NumSet& b, const NumSet& c, const apx::EquationSpec& eq) {
  const Rational k = eq.coefficient();
  std::uint64_t total = 0;
  for (const auto& x : a)
    for (const auto& y : b)
      for (const auto& z : c) {
        const Rational lhs = eq.is_difference() ? x - y : x + y;
        if (lhs == k * z) ++total;
      }
  return total;
}

/// The majorant written out from its definition: sort, then branch.
inline Rational naive_majorant(Rational x, Rational y, Rational z) {
  std::vector<Rational> v{x, y, z};
  std::sort(v.begin(), v.end());
  const Rational prod = v[0] * v[1];
  if (v[2] >= v[0] + v[1]) return prod;
  const Rational e = v[0] + v[1] - v[2];
  return prod - e * e / Rational(4);
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  Rational rational(long max_abs_num, long max_den) {
    return Rational(integer(-max_abs_num, max_abs_num), integer(1, max_den));
  }

  NumSet int_set(long lo, long hi, std::size_t max_size) {
    const auto n = static_cast<std::size_t>(integer(0, static_cast<long>(max_size)));
    std::vector<Rational> xs;
    for (std::size_t i = 0; i < n; ++i) xs.emplace_back(integer(lo, hi));
    return NumSet(std::move(xs));
  }

  NumSet rational_set(std::size_t max_size, long max_num, long max_den) {
    const auto n = static_cast<std::size_t>(integer(0, static_cast<long>(max_size)));
    std::vector<Rational> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(rational(max_num, max_den));
    return NumSet(std::move(xs));
  }

  NumSet antisymmetric_set(long max_abs, std::size_t max_size) {
    std::vector<Rational> xs;
    std::set<long> used;
    const auto n = static_cast<std::size_t>(integer(0, static_cast<long>(max_size)));
    for (std::size_t i = 0; i < n * 4 && xs.size() < n; ++i) {
      const long v = integer(1, max_abs) * (integer(0, 1) ? 1 : -1);
      if (used.count(v) || used.count(-v)) continue;
      used.insert(v);
      xs.emplace_back(v);
    }
    return NumSet(std::move(xs));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Every subset of {lo, ..., hi} with at most max_size elements.
inline std::vector<NumSet> all_subsets(long lo, long hi, std::size_t max_size) {
  std::vector<NumSet> out;
  const int width = static_cast<int>(hi - lo + 1);
  for (std::uint32_t m = 0; m < (1u << width); ++m) {
    if (static_cast<std::size_t>(__builtin_popcount(m)) > max_size) continue;
    std::vector<Rational> xs;
    for (int i = 0; i < width; ++i)
      if ((m >> i) & 1u) xs.emplace_back(lo + i);
    out.emplace_back(std::move(xs));
  }
  return out;
}

}  // namespace testing_support
