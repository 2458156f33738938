#include "apx/constructions.hpp"

#include <string>
#include <vector>

namespace apx {

NumSet staircase(std::int64_t m) {
  if (m <= 0 || m % 2 != 0) throw DomainError("staircase needs an even m >= 2, got " + std::to_string(m));
  std::vector<Rational> v;
  v.reserve(static_cast<std::size_t>(5 * m / 2));
  for (std::int64_t i = 1; i <= m; ++i) v.emplace_back(static_cast<long>(i));
  for (std::int64_t i = m + 2; i <= 4 * m; i += 2) v.emplace_back(static_cast<long>(i));
  return NumSet(std::move(v));
}

NumSet symmetric_interval(std::int64_t m) {
  if (m <= 0) throw DomainError("symmetric interval needs m >= 1, got " + std::to_string(m));
  std::vector<Rational> v;
  for (std::int64_t i = -m; i <= m; ++i) v.emplace_back(static_cast<long>(i));
  return NumSet(std::move(v));
}

NumSet integer_block(const mpz_class& first, std::int64_t n) {
  if (n < 0) throw DomainError("block size must be non-negative");
  std::vector<Rational> v;
  v.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) v.emplace_back(mpz_class(first + i));
  return NumSet(std::move(v));
}

namespace {

mpz_class block_start(const Rational& med, std::int64_t n, const char* which) {
  const Rational start = med - Rational(n - 1, 2);
  if (!start.is_integer())
    throw DomainError(std::string("midpoint ") + med.str() + " of " + which + " is not realizable by " +
                      std::to_string(n) + " consecutive integers");
  return start.num();
}

}  // namespace

BlockTriple compression_blocks(std::int64_t n_a, std::int64_t n_b, std::int64_t n_c, const Rational& med_a,
                               const Rational& med_b) {
  if (n_a < 0 || n_b < 0 || n_c < 0) throw DomainError("block sizes must be non-negative");
  BlockTriple out;
  if (n_a > 0) out.a = integer_block(block_start(med_a, n_a, "A"), n_a);
  if (n_b > 0) out.b = integer_block(block_start(med_b, n_b, "B"), n_b);
  if (n_c > 0) {
    const Rational target = (n_a > 0 && n_b > 0) ? med_a + med_b : Rational(0);
    // Midpoints of C-blocks are start + (n_c - 1)/2; pick the nearest start,
    // rounding half down.
    const Rational ideal = target - Rational(n_c - 1, 2);
    const mpz_class start = ceil(ideal - Rational(1, 2));
    out.c = integer_block(start, n_c);
  }
  return out;
}

}  // namespace apx
