#pragma once

#include <cstdint>

#include "apx/numset.hpp"
#include "apx/rational.hpp"

namespace apx {

/// {1, ..., m} u {m+2, m+4, ..., 4m} for even m >= 2. Has 5m/2 elements and
/// 15m^2/8 - 5m/4 solutions of a - b = 2c.
NumSet staircase(std::int64_t m);

/// {-m, ..., m} for m >= 1; (m+1)^2 + m^2 solutions of a - b = 2c.
NumSet symmetric_interval(std::int64_t m);

struct BlockTriple {
  NumSet a, b, c;
};

/// Consecutive-integer blocks with the requested sizes, where the blocks for A
/// and B have midpoints med_a and med_b and the block for C has its midpoint
/// as close as possible to med_a + med_b (ties go to the smaller midpoint).
/// A block of size n has midpoint in Z + (n-1)/2; DomainError otherwise.
/// Midpoints of empty blocks are ignored; with an empty A or B the target for
/// C is taken as 0.
BlockTriple compression_blocks(std::int64_t n_a, std::int64_t n_b, std::int64_t n_c, const Rational& med_a,
                               const Rational& med_b);

/// Block of n consecutive integers starting at `first`.
NumSet integer_block(const mpz_class& first, std::int64_t n);

}  // namespace apx
