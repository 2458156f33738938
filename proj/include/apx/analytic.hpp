#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "apx/interval.hpp"
#include "apx/rational.hpp"

namespace apx {

/// (x0, x1, y0, y1) for f and g; u, v, and the symmetric slice take (x0, x1).
using Point4 = std::array<Rational, 4>;
using Box4 = std::array<Interval, 4>;

/// Enclosure of {majorant(a, b, c) : a in x, b in y, c in z}. The sorted
/// triple is enclosed by interval min / median / max, and the plus-part
/// covers both branches whenever the case condition is undecided.
Interval majorant_enclosure(const Interval& x, const Interval& y, const Interval& z);

/// min{3/20 s^2, x0 y0 + x1 y1} + G(x0, y1, 1-s) + G(x1, y0, 1-s) + (1-s)^2 / 4
/// with s = x0 + x1 + y0 + y1 and G = majorant.
Rational eval_f(const Point4& p);
Interval eval_f(const Box4& b);

/// min{3/20 s^2, x0 y0 + x1 y1} + (x1 + y1)(1-s) + (1-s)^2 / 4.
Rational eval_g(const Point4& p);
Interval eval_g(const Box4& b);

/// 2x0^2 - 2x0x1 - 2x1^2 - x0 + x1.
Rational eval_u(const Rational& x0, const Rational& x1);
Interval eval_u(const Interval& x0, const Interval& x1);

/// 8/5 x0^2 - 4/5 x0x1 - 12/5 x1^2 - x0 + x1.
Rational eval_v(const Rational& x0, const Rational& x1);
Interval eval_v(const Interval& x0, const Interval& x1);

/// f(x0, x1, x1, x0).
Rational eval_claim1(const Rational& x0, const Rational& x1);
/// The same quantity through its specialized form
/// min{3/20 s^2, 2x0x1} + G(x0, x0, 1-s) + G(x1, x1, 1-s) + (1-s)^2 / 4, s = 2(x0 + x1).
Rational eval_claim1_specialized(const Rational& x0, const Rational& x1);

struct IdentityReport {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::vector<std::string> failing;  // first few offending inputs
  /// Checks outside the proven domain, reported but not counted as failures.
  std::uint64_t probe_trials = 0;
  std::uint64_t probe_mismatches = 0;
  std::string note;

  bool ok() const { return failures == 0; }
};

/// G((x+y)/2, (x+y)/2, z) = G(x, y, z) + (x-y)^2/4 - (|x-y| - z)_+^2 / 4 and
/// the inequality G((x+y)/2, (x+y)/2, z) >= G(x, y, z), on random
/// non-negative rational triples plus every case-boundary configuration.
IdentityReport verify_balancing_identity(std::uint64_t trials, std::uint64_t seed);

/// G(x, x, z) <= xz - z^2/4 for 0 <= z <= 2x, including z = x and z = 2x.
IdentityReport verify_xy_lemma(std::uint64_t trials, std::uint64_t seed);

/// decomposition_check on random integer set pairs.
IdentityReport verify_decomposition(std::uint64_t trials, std::uint64_t seed);

struct CriticalPoint {
  std::string function;
  Rational x0, x1;
  std::string line;  // the line the point was checked against
  bool on_line = false;
};

/// Solves grad u = 0 and grad v = 0 exactly and checks the two points against
/// 3x0 + x1 = 1 and x0 + x1 = 1/2 respectively.
std::vector<CriticalPoint> critical_point_report();

}  // namespace apx
