#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>

#include "apx/numset.hpp"
#include "support.hpp"

using namespace apx;
using testing_support::Gen;
using testing_support::naive_count;

TEST_CASE("rational canonical form") {
  const Rational r(6, -4);
  CHECK(r.num() == -3);
  CHECK(r.den() == 2);
  CHECK(Rational(0, 5).den() == 1);
  CHECK(Rational(0, 5).str() == "0");
  CHECK(Rational(-3, 2).str() == "-3/2");
  CHECK_THROWS_AS(Rational(1, 0), DomainError);
  CHECK_THROWS_AS(Rational(1) / Rational(0), DomainError);
}

TEST_CASE("rational parsing is exact") {
  CHECK(Rational::parse("0.15") == Rational(3, 20));
  CHECK(Rational::parse("-2.5") == Rational(-5, 2));
  CHECK(Rational::parse("10/4") == Rational(5, 2));
  CHECK(Rational::parse("-7") == Rational(-7));
  CHECK(Rational::parse("123456789012345678901234567890").str() == "123456789012345678901234567890");
  for (const char* bad : {"", "1.", ".5", "1/0", "1/-2", "abc", "1e5", "--1", "1/02x", "+3"})
    CHECK_THROWS_AS(Rational::parse(bad), ParseError);
}

TEST_CASE("rational dyadic rounding brackets the value") {
  Gen gen(7);
  for (int i = 0; i < 2000; ++i) {
    const Rational x = gen.rational(1000, 997);
    const Rational lo = round_down(x, 20), hi = round_up(x, 20);
    CHECK(lo <= x);
    CHECK(x <= hi);
    CHECK(hi - lo <= Rational(1, 1 << 20));
  }
  CHECK(round_up(Rational(3, 4), 2) == Rational(3, 4));
  CHECK(floor(Rational(-1, 2)) == -1);
  CHECK(ceil(Rational(-1, 2)) == 0);
}

TEST_CASE("parse_set examples") {
  CHECK(parse_set("1\n2\n2\n4") == NumSet::from_integers({1, 2, 4}));
  CHECK(parse_set("1/3\n5/6\n1/2") == NumSet({Rational(1, 3), Rational(1, 2), Rational(5, 6)}));
  CHECK(parse_set("0.15") == NumSet({Rational(3, 20)}));
  CHECK(parse_set("").empty());
  CHECK(parse_set("# only a comment\n\n").empty());
  CHECK(parse_set("1\r\n-2\r\n# c\r\n3 # trailing\r\n") == NumSet::from_integers({-2, 1, 3}));
  CHECK(parse_set("[1, 2, 5/3]") == NumSet({Rational(1), Rational(2), Rational(5, 3)}));
  CHECK(parse_set("[]").empty());
}

TEST_CASE("parse_set reports the offending line") {
  try {
    parse_set("1\n2\nx3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_set("1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_set("[1, 2"), ParseError);
}

TEST_CASE("set file round trip") {
  Gen gen(11);
  const std::string path = "numset_roundtrip.txt";
  for (int i = 0; i < 50; ++i) {
    const NumSet s = gen.rational_set(12, 50, 9);
    {
      std::ofstream out(path);
      out << format_set(s);
    }
    CHECK(read_set_file(path) == s);
  }
  std::remove(path.c_str());
  CHECK_THROWS(read_set_file("does/not/exist.txt"));
}

TEST_CASE("affine images") {
  const auto s = NumSet::from_integers({1, 2, 4});
  CHECK(affine_image(s, AffineMap(2, 1)) == NumSet::from_integers({3, 5, 9}));
  CHECK(affine_image(s, AffineMap(1, 0)) == s);
  const auto sym = NumSet::from_integers({-1, 0, 1});
  CHECK(affine_image(sym, AffineMap(-1, 0)) == sym);
  CHECK_THROWS_AS(AffineMap(0, 1), DomainError);
}

TEST_CASE("negation and antisymmetry") {
  CHECK(negate(NumSet::from_integers({1, 3, 5})) == NumSet::from_integers({-5, -3, -1}));
  CHECK(negate(NumSet{}).empty());
  CHECK(negate(NumSet::from_integers({0})) == NumSet::from_integers({0}));
  CHECK(is_antisymmetric(NumSet::from_integers({1, 2, 4})));
  CHECK(is_antisymmetric(NumSet::from_integers({-1, 2})));
  CHECK_FALSE(is_antisymmetric(NumSet::from_integers({-1, 0, 1})));
  CHECK_FALSE(is_antisymmetric(NumSet::from_integers({0})));
  CHECK(is_antisymmetric(NumSet{}));
  CHECK(midpoint(NumSet::from_integers({1, 2, 4})) == Rational(5, 2));
  CHECK_THROWS_AS(midpoint(NumSet{}), DomainError);
}

TEST_CASE("integer reduction examples") {
  {
    const std::array<NumSet, 1> in{NumSet({Rational(1, 3), Rational(1, 2), Rational(5, 6)})};
    const auto img = to_integer_sets(in);
    CHECK(img.scale == 6);
    CHECK(img.sets[0] == NumSet::from_integers({2, 3, 5}));
  }
  {
    const std::array<NumSet, 1> in{NumSet::from_integers({1, 2, 4})};
    const auto img = to_integer_sets(in);
    CHECK(img.scale == 1);
    CHECK(img.sets[0] == in[0]);
  }
  {
    const std::array<NumSet, 2> in{NumSet({Rational(1, 2)}), NumSet({Rational(3, 2)})};
    const auto img = to_integer_sets(in);
    CHECK(img.scale == 2);
    CHECK(img.sets[0] == NumSet::from_integers({1}));
    CHECK(img.sets[1] == NumSet::from_integers({3}));
    const auto eq = EquationSpec::ap_sum();
    CHECK(naive_count(in[0], in[1], set_union(in[0], in[1]), eq) ==
          naive_count(img.sets[0], img.sets[1], set_union(img.sets[0], img.sets[1]), eq));
  }
}

// Properties ---------------------------------------------------------------

TEST_CASE("property: affine images preserve size and the a+b=2c count") {
  Gen gen(2024);
  const auto eq = EquationSpec::ap_sum();
  for (int i = 0; i < 400; ++i) {
    const NumSet a = gen.rational_set(6, 12, 4), b = gen.rational_set(6, 12, 4), c = gen.rational_set(6, 12, 4);
    Rational scale = gen.rational(9, 5);
    if (scale.is_zero()) scale = 1;
    const AffineMap m(scale, gen.rational(20, 7));
    const NumSet ma = affine_image(a, m), mb = affine_image(b, m), mc = affine_image(c, m);
    CHECK(ma.size() == a.size());
    CHECK(naive_count(a, b, c, eq) == naive_count(ma, mb, mc, eq));
    CHECK(negate(negate(a)) == a);
  }
}

TEST_CASE("property: a-b=2c is dilation invariant but not translation invariant") {
  Gen gen(99);
  const auto eq = EquationSpec::ap_diff();
  for (int i = 0; i < 300; ++i) {
    const NumSet a = gen.int_set(-8, 8, 6);
    Rational scale = gen.rational(7, 3);
    if (scale.is_zero()) scale = -1;
    const NumSet da = affine_image(a, AffineMap(scale, 0));
    CHECK(naive_count(a, a, a, eq) == naive_count(da, da, da, eq));
  }
  // {0} has one solution (0,0,0); {1} has none.
  const auto zero = NumSet::from_integers({0});
  const auto one = affine_image(zero, AffineMap(1, 1));
  CHECK(naive_count(zero, zero, zero, eq) != naive_count(one, one, one, eq));
}

TEST_CASE("property: integer reduction preserves every equation count") {
  Gen gen(5);
  const std::array<EquationSpec, 5> eqs{EquationSpec::ap_sum(), EquationSpec::ap_diff(), EquationSpec::plain_sum(),
                                        EquationSpec::lambda_sum(Rational(3, 2)),
                                        EquationSpec::lambda_diff(Rational(5))};
  for (int i = 0; i < 200; ++i) {
    const std::array<NumSet, 3> in{gen.rational_set(5, 10, 6), gen.rational_set(5, 10, 6), gen.rational_set(5, 10, 6)};
    const auto img = to_integer_sets(in);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(img.sets[k].size() == in[k].size());
      CHECK(img.sets[k].all_integers());
    }
    for (const auto& eq : eqs) CHECK(naive_count(in[0], in[1], in[2], eq) == naive_count(img.sets[0], img.sets[1], img.sets[2], eq));
  }
}
