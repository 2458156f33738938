#include "apx/analytic.hpp"

#include <random>

#include "apx/counting.hpp"
#include "apx/numset.hpp"

namespace apx {

namespace {

const Rational kP15(3, 20);
const Rational kQuarter(1, 4);

Rational sq(const Rational& x) { return x * x; }

}  // namespace

Interval majorant_enclosure(const Interval& x, const Interval& y, const Interval& z) {
  const Interval lo = min(min(x, y), z);
  const Interval mid = median(x, y, z);
  const Interval hi = max(max(x, y), z);
  return lo * mid - Interval(kQuarter) * sqr(positive_part(lo + mid - hi));
}

Rational eval_f(const Point4& p) {
  const auto& [x0, x1, y0, y1] = p;
  const Rational s = x0 + x1 + y0 + y1;
  const Rational t = 1 - s;
  return min(kP15 * s * s, x0 * y0 + x1 * y1) + majorant(x0, y1, t) + majorant(x1, y0, t) + kQuarter * t * t;
}

Interval eval_f(const Box4& b) {
  const auto& [x0, x1, y0, y1] = b;
  const Interval s = x0 + x1 + y0 + y1;
  const Interval t = Interval(1) - s;
  return min(Interval(kP15) * sqr(s), x0 * y0 + x1 * y1) + majorant_enclosure(x0, y1, t) +
         majorant_enclosure(x1, y0, t) + Interval(kQuarter) * sqr(t);
}

Rational eval_g(const Point4& p) {
  const auto& [x0, x1, y0, y1] = p;
  const Rational s = x0 + x1 + y0 + y1;
  const Rational t = 1 - s;
  return min(kP15 * s * s, x0 * y0 + x1 * y1) + (x1 + y1) * t + kQuarter * t * t;
}

Interval eval_g(const Box4& b) {
  const auto& [x0, x1, y0, y1] = b;
  const Interval s = x0 + x1 + y0 + y1;
  const Interval t = Interval(1) - s;
  return min(Interval(kP15) * sqr(s), x0 * y0 + x1 * y1) + (x1 + y1) * t + Interval(kQuarter) * sqr(t);
}

Rational eval_u(const Rational& x0, const Rational& x1) {
  return 2 * x0 * x0 - 2 * x0 * x1 - 2 * x1 * x1 - x0 + x1;
}

Interval eval_u(const Interval& x0, const Interval& x1) {
  return Interval(2) * sqr(x0) - Interval(2) * x0 * x1 - Interval(2) * sqr(x1) - x0 + x1;
}

Rational eval_v(const Rational& x0, const Rational& x1) {
  return Rational(8, 5) * x0 * x0 - Rational(4, 5) * x0 * x1 - Rational(12, 5) * x1 * x1 - x0 + x1;
}

Interval eval_v(const Interval& x0, const Interval& x1) {
  return Interval(Rational(8, 5)) * sqr(x0) - Interval(Rational(4, 5)) * x0 * x1 -
         Interval(Rational(12, 5)) * sqr(x1) - x0 + x1;
}

Rational eval_claim1(const Rational& x0, const Rational& x1) { return eval_f(Point4{x0, x1, x1, x0}); }

Rational eval_claim1_specialized(const Rational& x0, const Rational& x1) {
  const Rational s = 2 * (x0 + x1);
  const Rational t = 1 - s;
  return min(kP15 * s * s, 2 * x0 * x1) + majorant(x0, x0, t) + majorant(x1, x1, t) + kQuarter * t * t;
}

namespace {

class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : gen_(seed) {}
  /// num/den with num in [lo, hi] and den in [1, max_den].
  Rational draw(long lo, long hi, long max_den) {
    std::uniform_int_distribution<long> num(lo * max_den, hi * max_den);
    std::uniform_int_distribution<long> den(1, max_den);
    return Rational(num(gen_), den(gen_));
  }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }

 private:
  std::mt19937_64 gen_;
};

constexpr std::size_t kMaxFailing = 10;

void record_failure(IdentityReport& r, std::string what) {
  ++r.failures;
  if (r.failing.size() < kMaxFailing) r.failing.push_back(std::move(what));
}

std::string triple(const Rational& x, const Rational& y, const Rational& z) {
  return "(" + x.str() + ", " + y.str() + ", " + z.str() + ")";
}

Rational balanced_side(const Rational& x, const Rational& y, const Rational& z) {
  const Rational avg = (x + y) / 2;
  return majorant(avg, avg, z);
}

Rational balancing_rhs(const Rational& x, const Rational& y, const Rational& z) {
  const Rational excess = max(abs(x - y) - z, Rational(0));
  return majorant(x, y, z) + kQuarter * sq(x - y) - kQuarter * sq(excess);
}

}  // namespace

IdentityReport verify_balancing_identity(std::uint64_t trials, std::uint64_t seed) {
  IdentityReport r;
  r.name = "balancing";
  RationalSampler rng(seed);
  auto check = [&](const Rational& x, const Rational& y, const Rational& z) {
    ++r.trials;
    const Rational lhs = balanced_side(x, y, z);
    if (lhs != balancing_rhs(x, y, z)) record_failure(r, "identity " + triple(x, y, z));
    if (lhs < majorant(x, y, z)) record_failure(r, "inequality " + triple(x, y, z));
  };
  for (std::uint64_t i = 0; i < trials; ++i) {
    const Rational x = rng.draw(0, 40, 12);
    const Rational y = rng.draw(0, 40, 12);
    const Rational z = rng.draw(0, 80, 12);
    check(x, y, z);
    if (i % 16 == 0) {
      check(x, y, x);
      check(x, y, (x + y) / 2);
      check(x, y, y);
      check(x, y, abs(x - y));
      check(x, y, x + y);
      check(x, y, Rational(0));
      check(x, x, z);
    }
  }
  // Outside the non-negative domain the identity is not expected to hold.
  for (std::uint64_t i = 0; i < trials / 10 + 1; ++i) {
    const Rational x = rng.draw(-40, 40, 12);
    const Rational y = rng.draw(-40, 40, 12);
    const Rational z = rng.draw(-40, 40, 12);
    ++r.probe_trials;
    if (balanced_side(x, y, z) != balancing_rhs(x, y, z)) ++r.probe_mismatches;
  }
  r.note = "sampled over non-negative triples; signed triples are probed separately";
  return r;
}

IdentityReport verify_xy_lemma(std::uint64_t trials, std::uint64_t seed) {
  IdentityReport r;
  r.name = "xy-lemma";
  RationalSampler rng(seed);
  auto check = [&](const Rational& x, const Rational& z) {
    ++r.trials;
    if (majorant(x, x, z) > x * z - kQuarter * z * z) record_failure(r, "(x, z) = (" + x.str() + ", " + z.str() + ")");
  };
  for (std::uint64_t i = 0; i < trials; ++i) {
    const Rational x = rng.draw(0, 40, 12);
    const Rational z = 2 * x * Rational(rng.integer(0, 1000), 1000);
    check(x, z);
    if (i % 16 == 0) {
      check(x, x);
      check(x, 2 * x);
      check(x, Rational(0));
    }
  }
  for (std::uint64_t i = 0; i < trials / 10 + 1; ++i) {
    const Rational x = rng.draw(-40, 40, 12);
    const Rational z = min(rng.draw(-40, 40, 12), 2 * x);
    ++r.probe_trials;
    if (majorant(x, x, z) > x * z - kQuarter * z * z) ++r.probe_mismatches;
  }
  r.note = "sampled over 0 <= z <= 2x; signed pairs are probed separately";
  return r;
}

IdentityReport verify_decomposition(std::uint64_t trials, std::uint64_t seed) {
  IdentityReport r;
  r.name = "decomposition";
  RationalSampler rng(seed);
  auto draw_set = [&] {
    std::vector<long> v(static_cast<std::size_t>(rng.integer(0, 8)));
    for (auto& x : v) x = rng.integer(-20, 20);
    return NumSet::from_integers(v);
  };
  for (std::uint64_t i = 0; i < trials; ++i) {
    const NumSet a = draw_set();
    const NumSet b = draw_set();
    ++r.trials;
    if (!decomposition_check(a, b))
      record_failure(r, "A=" + format_set(a) + " B=" + format_set(b));
  }
  return r;
}

namespace {

/// Stationary point of a x0^2 + b x0 x1 + c x1^2 + d x0 + e x1.
std::pair<Rational, Rational> stationary_point(const Rational& a, const Rational& b, const Rational& c,
                                               const Rational& d, const Rational& e) {
  // [2a b; b 2c] (x0, x1) = (-d, -e)
  const Rational det = 4 * a * c - b * b;
  if (det.is_zero()) throw DomainError("degenerate quadratic has no unique stationary point");
  return {(-d * 2 * c + e * b) / det, (-e * 2 * a + d * b) / det};
}

}  // namespace

std::vector<CriticalPoint> critical_point_report() {
  std::vector<CriticalPoint> out;
  {
    auto [x0, x1] = stationary_point(2, -2, -2, -1, 1);
    out.push_back({"u", x0, x1, "3x0+x1=1", 3 * x0 + x1 == 1});
  }
  {
    auto [x0, x1] = stationary_point(Rational(8, 5), Rational(-4, 5), Rational(-12, 5), -1, 1);
    out.push_back({"v", x0, x1, "x0+x1=1/2", x0 + x1 == Rational(1, 2)});
  }
  return out;
}

}  // namespace apx
