#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apx/numset.hpp"
#include "apx/rational.hpp"

namespace apx {

enum class EquationKind {
  ApSum,       // a + b = 2c
  ApDiff,      // a - b = 2c
  PlainSum,    // a + b = c
  LambdaSum,   // a + b = lambda c
  LambdaDiff,  // a - b = lambda c
};

/// Which linear equation a triple count refers to. Every supported equation
/// has the shape a (+|-) b = k c with a rational k > 0.
class EquationSpec {
 public:
  static EquationSpec ap_sum() { return EquationSpec(EquationKind::ApSum, 2); }
  static EquationSpec ap_diff() { return EquationSpec(EquationKind::ApDiff, 2); }
  static EquationSpec plain_sum() { return EquationSpec(EquationKind::PlainSum, 1); }
  static EquationSpec lambda_sum(Rational lambda);
  static EquationSpec lambda_diff(Rational lambda);

  EquationKind kind() const { return kind_; }
  /// The coefficient k of c; for the lambda kinds this is lambda itself.
  const Rational& coefficient() const { return coeff_; }
  bool is_difference() const { return kind_ == EquationKind::ApDiff || kind_ == EquationKind::LambdaDiff; }
  bool is_lambda() const { return kind_ == EquationKind::LambdaSum || kind_ == EquationKind::LambdaDiff; }
  std::string name() const;

  friend bool operator==(const EquationSpec&, const EquationSpec&) = default;

 private:
  EquationSpec(EquationKind kind, Rational coeff) : kind_(kind), coeff_(std::move(coeff)) {}
  EquationKind kind_;
  Rational coeff_;
};

enum class CountMethod { Auto, Pairs, Convolution };

/// Number of ordered triples (a, b, c) in A x B x C satisfying `eq`.
std::uint64_t count_solutions(const NumSet& a, const NumSet& b, const NumSet& c, const EquationSpec& eq,
                              CountMethod method = CountMethod::Auto);

struct BoundCheck {
  std::string name;
  Rational value;
  Rational slack;  // value - count
};

struct CountReport {
  std::uint64_t count = 0;
  std::array<std::size_t, 3> sizes{};
  std::vector<BoundCheck> bounds;

  bool violated() const;
  const BoundCheck* find(const std::string& name) const;
};

/// Counts solutions and attaches every closed-form bound that applies to the
/// configuration.
CountReport count_triples(const NumSet& a, const NumSet& b, const NumSet& c, const EquationSpec& eq,
                          CountMethod method = CountMethod::Auto);

/// Triples (a, b, c) in A^3 with a - b = 2c. For antisymmetric A this also
/// cross-checks against the sum form T(A, -A, A u -A) = 2 * count.
CountReport count_diff(const NumSet& a);

std::string to_structured(const CountReport& r);
std::string to_table(const CountReport& r);

/// The piecewise-quadratic majorant of restricted sum counts: with
/// (p, q, r) the sorted triple, p*q when r >= p + q and
/// p*q - (p + q - r)^2 / 4 otherwise. Symmetric in its arguments.
Rational majorant(const Rational& x, const Rational& y, const Rational& z);

Rational main_bound(std::int64_t n_a, std::int64_t n_b);
Rational antisymmetric_bound(std::int64_t n);
Rational principal_bound(std::int64_t n);
/// |A||B| - (|A| + |B| - |C|)^2 / 4 + 1/4 for a + b = c; requires
/// max(|A|, |B|) <= |C| <= |A| + |B|.
Rational plain_sum_bound(std::int64_t n_a, std::int64_t n_b, std::int64_t n_c);
/// majorant(|A|, |B|, |C|) + 1/4.
Rational size_majorant_bound(std::int64_t n_a, std::int64_t n_b, std::int64_t n_c);

/// Residue class sizes: m0/m1 by parity, m_ij for x = i + 2j (mod 4).
struct ParityProfile {
  std::size_t m0 = 0, m1 = 0, m00 = 0, m01 = 0, m10 = 0, m11 = 0;
  friend bool operator==(const ParityProfile&, const ParityProfile&) = default;
};

/// Residues are taken in {0, 1, 2, 3} also for negative integers.
ParityProfile parity_profile(const NumSet& a);

/// Residue class {x in s : x = r (mod m)} of an integer set.
NumSet residue_class(const NumSet& s, long modulus, long residue);

/// Checks T(A,B,AuB) = T(A0,B0,A0uB0) + T(A0,B0,A1uB1) + T(A1,B1,AuB) for
/// integer sets split by parity.
bool decomposition_check(const NumSet& a, const NumSet& b);

struct CaseBound {
  bool applies = false;
  Rational bound;
  Rational slack;
};

struct CaseBoundReport {
  bool skipped = false;
  std::string note;
  mpz_class divisor;      // gcd used to normalize
  bool negated = false;
  ParityProfile profile;  // of the normalized set
  std::uint64_t count = 0;
  CaseBound even_majority;  // m0 >= m1
  CaseBound odd_majority;   // m1 >= m0
};

/// Normalizes an integer set (divide by the gcd of its elements, possibly
/// negate) and evaluates the two parity-case bounds on T(A, -A, A).
CaseBoundReport case_bound_checks(const NumSet& a);

}  // namespace apx
