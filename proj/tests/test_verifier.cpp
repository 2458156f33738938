#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "apx/analytic.hpp"
#include "apx/certify.hpp"
#include "apx/counting.hpp"
#include "support.hpp"

using namespace apx;
using testing_support::Gen;
using testing_support::naive_majorant;

namespace {

Rational r(long p, long q = 1) { return Rational(p, q); }

/// Nonnegative rational in [0, hi] on a grid of 1/den.
Rational nonneg(Gen& gen, long hi_num, long den) { return Rational(gen.integer(0, hi_num), den); }

Interval random_interval(Gen& gen, long den) {
  const Rational a = nonneg(gen, den, den), w = Rational(gen.integer(0, den / 8), den);
  return {a, a + w};
}

Rational sample(Gen& gen, const Interval& iv) {
  const long k = gen.integer(0, 64);
  return iv.lo() + iv.width() * Rational(k, 64);
}

Rational phi_poly(const Rational& x) { return x * x - 3 * x + 1; }

}  // namespace

TEST_CASE("point evaluations") {
  CHECK(eval_f(Point4{r(1, 5), r(1, 5), r(1, 5), r(1, 5)}) == r(3, 20));
  CHECK(eval_f(Point4{r(0), r(0), r(0), r(1, 2)}) == r(1, 16));
  CHECK(eval_f(Point4{r(1, 2), r(0), r(1, 2), r(0)}) == r(3, 20));
  CHECK(eval_u(r(3, 10), r(1, 10)) == r(-1, 10));
  CHECK(eval_v(r(1, 4), r(1, 4)) == r(-1, 10));
  CHECK(eval_v(r(1, 2), r(0)) == r(-1, 10));
  CHECK(eval_claim1(r(1, 5), r(1, 5)) == r(3, 20));
}

TEST_CASE("majorant enclosure examples") {
  const Interval g = majorant_enclosure(9, 6, 7);
  CHECK(g.is_point());
  CHECK(g.lo() == 38);
  const Interval z = majorant_enclosure(0, Interval(r(0), r(3)), Interval(r(1), r(2)));
  CHECK(z.contains(Rational(0)));
  CHECK(z.hi() >= 0);
  const Interval t = majorant_enclosure(Interval(r(1, 10), r(3, 10)), Interval(r(1, 10), r(3, 10)), r(1, 5));
  CHECK(t.contains(r(3, 100)));
}

TEST_CASE("interval basics") {
  CHECK_THROWS_AS(Interval(r(1), r(0)), DomainError);
  const Interval a(r(-1), r(2));
  CHECK(sqr(a).lo() == 0);
  CHECK(sqr(a).hi() >= 4);
  CHECK((a * a).lo() <= -2);
  CHECK(positive_part(Interval(r(-3), r(-1))) == Interval(0));
  CHECK(Interval(r(1, 3)) * Interval(r(3)) == Interval(1));
  const Interval o = Interval::outward(r(1, 3), r(2, 3));
  CHECK(o.lo() <= r(1, 3));
  CHECK(o.hi() >= r(2, 3));
  CHECK(o.lo().den() <= mpz_class(1) << 48);
}

TEST_CASE("identity suite examples") {
  // Balancing at (9, 6, 7): both sides equal 161/4.
  const Rational lhs = naive_majorant(r(15, 2), r(15, 2), 7);
  CHECK(lhs == r(161, 4));
  CHECK(majorant(9, 6, 7) + r(9, 4) == lhs);
  CHECK(majorant(1, 1, 2) == 1);
  CHECK(majorant(1, 1, 1) == r(3, 4));
  CHECK(majorant(1, 1, 0) == 0);
}

TEST_CASE("identity suites pass on their domains") {
  const auto b = verify_balancing_identity(20000, 1);
  CHECK(b.ok());
  // Case-boundary configurations are checked on top of the random triples.
  CHECK(b.trials > 20000);
  CHECK(b.failures == 0);
  const auto x = verify_xy_lemma(20000, 2);
  CHECK(x.ok());
  const auto d = verify_decomposition(2000, 3);
  CHECK(d.ok());
}

TEST_CASE("critical points") {
  const auto pts = critical_point_report();
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].x0 == r(3, 10));
  CHECK(pts[0].x1 == r(1, 10));
  CHECK(pts[0].on_line);
  CHECK(pts[1].x0 == r(7, 20));
  CHECK(pts[1].x1 == r(3, 20));
  CHECK(pts[1].on_line);
  CHECK(3 * r(3, 10) + r(1, 10) == 1);
}

TEST_CASE("golden bracket") {
  const auto [lo, hi] = golden_bracket(1000000);
  CHECK(lo < hi);
  CHECK(phi_poly(lo) > 0);
  CHECK(phi_poly(hi) < 0);
  CHECK(lo.den() <= 1000000);
  CHECK(hi.den() <= 1000000);
  CHECK(hi - lo < r(1, 100000000));
}

// Properties ---------------------------------------------------------------

TEST_CASE("property: enclosures contain every sampled point value") {
  Gen gen(31);
  for (int i = 0; i < 1500; ++i) {
    const Interval x = random_interval(gen, 256), y = random_interval(gen, 256), z = random_interval(gen, 256);
    const Interval w = random_interval(gen, 256);
    const Box4 box{x, y, z, w};
    const Interval g = majorant_enclosure(x, y, z), f = eval_f(box), gg = eval_g(box);
    const Interval u = eval_u(x, y), v = eval_v(x, y);
    for (int k = 0; k < 12; ++k) {
      const Rational a = sample(gen, x), b = sample(gen, y), c = sample(gen, z), d = sample(gen, w);
      CHECK(g.contains(majorant(a, b, c)));
      CHECK(f.contains(eval_f(Point4{a, b, c, d})));
      CHECK(gg.contains(eval_g(Point4{a, b, c, d})));
      CHECK(u.contains(eval_u(a, b)));
      CHECK(v.contains(eval_v(a, b)));
    }
  }
}

TEST_CASE("property: bisection never widens the enclosure") {
  Gen gen(32);
  for (int i = 0; i < 1500; ++i) {
    Box4 box{random_interval(gen, 128), random_interval(gen, 128), random_interval(gen, 128), random_interval(gen, 128)};
    const auto dim = static_cast<std::size_t>(gen.integer(0, 3));
    Box4 left = box, right = box;
    const Rational m = box[dim].mid();
    left[dim] = Interval(box[dim].lo(), m);
    right[dim] = Interval(m, box[dim].hi());
    CHECK(eval_f(box).contains(hull(eval_f(left), eval_f(right))));
    CHECK(eval_g(box).contains(hull(eval_g(left), eval_g(right))));
    CHECK(majorant_enclosure(box[0], box[1], box[2])
              .contains(hull(majorant_enclosure(left[0], left[1], left[2]),
                             majorant_enclosure(right[0], right[1], right[2]))));
  }
}

TEST_CASE("property: the symmetric slice of f matches its specialized form") {
  Gen gen(33);
  for (int i = 0; i < 3000; ++i) {
    const Rational a = nonneg(gen, 600, 997), b = nonneg(gen, 600, 991);
    CHECK(eval_claim1(a, b) == eval_claim1_specialized(a, b));
  }
}

TEST_CASE("property: min-side selection inside the two triangle parts") {
  Gen gen(34);
  const auto [phi_lo, phi_hi] = golden_bracket(1000000);
  const Rational margin(1, 200);
  int in_t = 0, in_r = 0;
  for (int i = 0; i < 6000; ++i) {
    // Barycentric sample of the triangle (1/3, 0), (1/2, 0), (1/4, 1/4).
    long p = gen.integer(1, 98), q = gen.integer(1, 98);
    if (p + q >= 100) continue;
    const Rational l1(p, 100), l2(q, 100), l0 = 1 - l1 - l2;
    const Rational x0 = l0 * r(1, 3) + l1 * r(1, 2) + l2 * r(1, 4), x1 = l2 * r(1, 4);
    const Rational u = eval_u(x0, x1), v = eval_v(x0, x1);
    if (x1 > phi_hi * x0 + margin) {
      ++in_t;
      CHECK(min(u, v) == u);
    } else if (x1 < phi_lo * x0 - margin) {
      ++in_r;
      CHECK(min(u, v) == v);
    }
  }
  CHECK(in_t > 500);
  CHECK(in_r > 500);
}

TEST_CASE("property: balancing x0 and y0 never decreases g") {
  Gen gen(35);
  for (int i = 0; i < 4000; ++i) {
    Point4 p{nonneg(gen, 250, 1000), nonneg(gen, 250, 1000), nonneg(gen, 250, 1000), nonneg(gen, 250, 1000)};
    const Rational avg = (p[0] + p[2]) / 2;
    const Point4 bal{avg, p[1], avg, p[3]};
    CHECK(eval_g(bal) >= eval_g(p));
  }
}

// Certification ----------------------------------------------------------

TEST_CASE("certify the slice and the two triangle parts") {
  for (const auto target : {CertTarget::Claim1, CertTarget::Claim2U, CertTarget::Claim2V}) {
    CAPTURE(target_name(target));
    const auto res = certify_sup(target, {});
    REQUIRE(res.ok());
    const Certificate& c = res.certificate;
    CHECK(c.max_bound <= c.threshold + c.tol);
    CHECK(c.leaves.size() == c.stats.leaves);
    const auto rep = replay_certificate(c);
    CHECK(rep.ok);
    const auto bounded = std::count_if(c.leaves.begin(), c.leaves.end(),
                                       [](const LeafRecord& l) { return l.form != FormKind::Outside; });
    CHECK(rep.leaves_checked == static_cast<std::uint64_t>(bounded));
    CHECK(c.leaves.size() == c.stats.leaves);
    CHECK(rep.max_bound == c.max_bound);
  }
  const auto c1 = certify_sup(CertTarget::Claim1, {});
  const auto w = c1.best_witness();
  REQUIRE(w.has_value());
  CHECK(w->value == r(3, 20));
  CHECK(default_threshold(CertTarget::Claim2U) == r(-1, 10));
  CHECK(default_threshold(CertTarget::LemmaInequality) == r(3, 20));
}

TEST_CASE("certificates round trip and do not depend on the worker count") {
  CertifyOptions one, four;
  four.jobs = 4;
  for (const auto target : {CertTarget::Claim1, CertTarget::Claim2U, CertTarget::Claim2V}) {
    const auto a = certify_sup(target, one), b = certify_sup(target, four);
    const std::string doc = certificate_to_json(a.certificate);
    CHECK(doc == certificate_to_json(b.certificate));
    const Certificate back = certificate_from_json(doc);
    CHECK(certificate_to_json(back) == doc);
    CHECK(replay_certificate(back).ok);
  }
}

TEST_CASE("replay rejects tampered certificates") {
  const auto res = certify_sup(CertTarget::Claim2U, {});
  REQUIRE(res.ok());
  {
    Certificate c = res.certificate;
    for (auto& leaf : c.leaves)
      if (leaf.form != FormKind::Outside) {
        leaf.bound = c.threshold - 1;
        break;
      }
    CHECK_FALSE(replay_certificate(c).ok);
  }
  {
    Certificate c = res.certificate;
    c.tree = c.tree.substr(1);
    CHECK_FALSE(replay_certificate(c).ok);
  }
  {
    Certificate c = res.certificate;
    c.leaves.pop_back();
    CHECK_FALSE(replay_certificate(c).ok);
  }
  {
    Certificate c = res.certificate;
    c.threshold = c.threshold - r(1, 10);
    CHECK_FALSE(replay_certificate(c).ok);
  }
  const std::string doc = certificate_to_json(res.certificate);
  CHECK_THROWS_AS(certificate_from_json(doc.substr(0, doc.size() / 3)), ParseError);
  CHECK_THROWS_AS(certificate_from_json("{\"format\": \"apx-certificate\", \"format_version\": 99}"), ParseError);
}

TEST_CASE("certification fails honestly below the true maximum") {
  CertifyOptions opts;
  opts.threshold = r(-1, 5);
  opts.budget = 20000;
  const auto res = certify_sup(CertTarget::Claim2U, opts);
  CHECK_FALSE(res.ok());
  CHECK_FALSE(res.surviving.empty());
  CertifyOptions tiny;
  tiny.budget = 5;
  const auto small = certify_sup(CertTarget::Claim1, tiny);
  CHECK(small.status == CertStatus::BudgetExhausted);
}
