#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "apx/search.hpp"
#include "support.hpp"

using namespace apx;
using testing_support::Gen;
using testing_support::naive_count;

namespace {

SearchSpec make(Objective o, int n, int span, EquationSpec eq) {
  SearchSpec s;
  s.objective = o;
  s.n = n;
  s.span = span;
  s.eq = std::move(eq);
  return s;
}

int positions(const SearchSpec& s) { return s.objective == Objective::MaxTUnion ? 2 * s.span : 2 * s.span + 1; }

/// All position lists of size n, no canonicalization, no pruning.
std::vector<std::vector<int>> all_configurations(const SearchSpec& s) {
  std::vector<std::vector<int>> out;
  const int total = positions(s);
  std::vector<int> cur;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(cur.size()) == s.n) {
      out.push_back(cur);
      return;
    }
    for (int p = next; p < total; ++p) {
      cur.push_back(p);
      self(self, p + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  if (s.objective == Objective::MaxDiffAntisym)
    std::erase_if(out, [&](const std::vector<int>& c) { return !is_antisymmetric(decode_configuration(s, c).a); });
  return out;
}

std::uint64_t naive_value(const SearchSpec& s, const std::vector<int>& pos) {
  const Configuration c = decode_configuration(s, pos);
  if (s.objective == Objective::MaxTUnion) return naive_count(c.a, c.b, set_union(c.a, c.b), s.eq);
  return naive_count(c.a, c.a, c.a, s.eq);
}

std::vector<int> encode(const SearchSpec& s, const std::vector<long>& a, const std::vector<long>& b) {
  std::vector<int> out;
  if (s.objective == Objective::MaxTUnion) {
    for (long x : a) out.push_back(static_cast<int>(x));
    for (long y : b) out.push_back(static_cast<int>(y + s.span));
  } else {
    for (long x : a) out.push_back(static_cast<int>(x + s.span));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<long> values(const NumSet& s) {
  std::vector<long> out;
  for (const auto& x : s) out.push_back(to_int64(x));
  return out;
}

/// Canonical representative computed from the definition of the orbit.
std::vector<int> canonical_of(const SearchSpec& s, const std::vector<int>& pos) {
  const Configuration c = decode_configuration(s, pos);
  std::vector<long> a = values(c.a), b = values(c.b);
  if (s.objective == Objective::MaxTUnion) {
    if (s.eq.kind() == EquationKind::ApSum) {
      long lo = 1L << 40;
      for (long x : a) lo = std::min(lo, x);
      for (long x : b) lo = std::min(lo, x);
      for (long& x : a) x -= lo;
      for (long& x : b) x -= lo;
    }
    long g = 0;
    for (long x : a) g = std::gcd(g, x);
    for (long x : b) g = std::gcd(g, x);
    if (g > 1) {
      for (long& x : a) x /= g;
      for (long& x : b) x /= g;
    }
    return encode(s, a, b);
  }
  long g = 0;
  for (long x : a) g = std::gcd(g, std::labs(x));
  if (g > 1)
    for (long& x : a) x /= g;
  std::vector<long> neg;
  for (long x : a) neg.push_back(-x);
  return std::max(encode(s, a, {}), encode(s, neg, {}));
}

std::vector<std::vector<int>> witness_positions(const SearchResult& r) { return r.state.witnesses; }

}  // namespace

TEST_CASE("search examples") {
  {
    const auto r = enumerate_max(make(Objective::MaxDiffAntisym, 3, 10, EquationSpec::ap_diff()), {});
    CHECK(r.best == 2);
    bool found = false;
    for (const auto& w : r.witnesses) found = found || w.a == NumSet::from_integers({1, 3, 5});
    CHECK(found);
  }
  {
    const auto r = enumerate_max(make(Objective::MaxDiff, 3, 1, EquationSpec::ap_diff()), {});
    CHECK(r.best == 5);
    REQUIRE(r.witnesses.size() == 1);
    CHECK(r.witnesses[0].a == NumSet::from_integers({-1, 0, 1}));
  }
  {
    const auto r = enumerate_max(make(Objective::MaxTUnion, 2, 1, EquationSpec::ap_sum()), {});
    CHECK(r.best == 1);
    REQUIRE(r.witnesses.size() == 1);
    CHECK(r.witnesses[0].a == NumSet::from_integers({0}));
    CHECK(r.witnesses[0].b == NumSet::from_integers({0}));
  }
}

TEST_CASE("infeasible specs are rejected") {
  CHECK_THROWS_AS(enumerate_max(make(Objective::MaxDiff, 0, 3, EquationSpec::ap_diff()), {}), DomainError);
  CHECK_THROWS_AS(enumerate_max(make(Objective::MaxDiff, 4, 1, EquationSpec::ap_diff()), {}), DomainError);
  CHECK_THROWS_AS(enumerate_max(make(Objective::MaxDiffAntisym, 3, 2, EquationSpec::ap_diff()), {}), DomainError);
  CHECK_THROWS_AS(enumerate_max(make(Objective::MaxTUnion, 3, 0, EquationSpec::ap_sum()), {}), DomainError);
  CHECK(parse_objective("max-diff") == Objective::MaxDiff);
  CHECK_FALSE(parse_objective("max").has_value());
}

TEST_CASE("property: search agrees with the naive oracle") {
  std::vector<SearchSpec> specs;
  for (int n = 1; n <= 5; ++n) {
    specs.push_back(make(Objective::MaxDiff, n, 4, EquationSpec::ap_diff()));
    specs.push_back(make(Objective::MaxTUnion, n, 4, EquationSpec::ap_sum()));
    specs.push_back(make(Objective::MaxTUnion, n, 4, EquationSpec::plain_sum()));
    if (n <= 4) specs.push_back(make(Objective::MaxDiffAntisym, n, 5, EquationSpec::ap_diff()));
    specs.push_back(make(Objective::MaxDiff, n, 3, EquationSpec::lambda_diff(Rational(3))));
    specs.push_back(make(Objective::MaxTUnion, n, 3, EquationSpec::lambda_sum(Rational(3, 2))));
  }
  for (const auto& s : specs) {
    CAPTURE(objective_name(s.objective));
    CAPTURE(s.eq.name());
    CAPTURE(s.n);
    std::int64_t best = -1;
    std::vector<std::vector<int>> maximizers;
    for (const auto& c : all_configurations(s)) {
      const auto v = static_cast<std::int64_t>(naive_value(s, c));
      if (v > best) {
        best = v;
        maximizers.clear();
      }
      if (v == best && is_canonical(s, c)) maximizers.push_back(c);
    }
    if (maximizers.size() > s.witness_cap) maximizers.resize(s.witness_cap);
    const auto r = enumerate_max(s, {});
    CHECK(r.best == best);
    CHECK(witness_positions(r) == maximizers);
    for (const auto& w : r.witnesses) CHECK(static_cast<std::int64_t>(objective_value(s, w)) == r.best);
  }
}

TEST_CASE("property: canonical forms are count-equivalent and unique per orbit") {
  std::vector<SearchSpec> specs{make(Objective::MaxDiff, 4, 5, EquationSpec::ap_diff()),
                                make(Objective::MaxDiffAntisym, 3, 6, EquationSpec::ap_diff()),
                                make(Objective::MaxTUnion, 4, 5, EquationSpec::ap_sum()),
                                make(Objective::MaxTUnion, 4, 5, EquationSpec::plain_sum())};
  for (const auto& s : specs) {
    for (const auto& c : all_configurations(s)) {
      const auto canon = canonical_of(s, c);
      CHECK(is_canonical(s, canon));
      CHECK(naive_value(s, canon) == naive_value(s, c));
      CHECK(is_canonical(s, c) == (canon == c));
    }
  }
}

TEST_CASE("property: pruning never changes the result") {
  Gen gen(21);
  for (int i = 0; i < 30; ++i) {
    const auto o = static_cast<Objective>(gen.integer(0, 2));
    const int n = static_cast<int>(gen.integer(1, 6));
    int span = static_cast<int>(gen.integer(1, 6));
    if (o == Objective::MaxDiffAntisym) span = std::max(span, n);
    if (o == Objective::MaxTUnion) span = std::max(span, (n + 1) / 2);
    if (o == Objective::MaxDiff) span = std::max(span, n / 2);
    const auto eq = o == Objective::MaxTUnion ? (gen.integer(0, 1) ? EquationSpec::ap_sum() : EquationSpec::plain_sum())
                                              : EquationSpec::ap_diff();
    SearchSpec s = make(o, n, span, eq);
    s.witness_cap = static_cast<std::size_t>(gen.integer(1, 80));
    const auto pruned = enumerate_max(s, {});
    s.prune = false;
    const auto full = enumerate_max(s, {});
    CHECK(pruned.best == full.best);
    CHECK(pruned.state.witnesses == full.state.witnesses);
  }
}

TEST_CASE("property: results do not depend on the worker count") {
  for (const auto& s : {make(Objective::MaxDiff, 5, 10, EquationSpec::ap_diff()),
                        make(Objective::MaxDiffAntisym, 5, 12, EquationSpec::ap_diff()),
                        make(Objective::MaxTUnion, 6, 8, EquationSpec::ap_sum())}) {
    const auto one = enumerate_max(s, {1, UINT64_MAX, 2});
    for (unsigned jobs : {2u, 4u, 7u}) {
      const auto many = enumerate_max(s, {jobs, UINT64_MAX, 2});
      CHECK(many.best == one.best);
      CHECK(many.state.witnesses == one.state.witnesses);
      CHECK(search_result_to_structured(many) == search_result_to_structured(one));
    }
  }
}

TEST_CASE("checkpoint: interrupted and resumed runs match a straight run") {
  const SearchSpec s = make(Objective::MaxDiff, 5, 9, EquationSpec::ap_diff());
  const auto straight = enumerate_max(s, {});
  SearchState state;
  bool have = false;
  int rounds = 0;
  for (;;) {
    ++rounds;
    try {
      const auto r = enumerate_max(s, {2, 2000, 2}, have ? &state : nullptr);
      CHECK(r.best == straight.best);
      CHECK(r.state.witnesses == straight.state.witnesses);
      CHECK(search_result_to_table(r) == search_result_to_table(straight));
      break;
    } catch (const BudgetExceeded& e) {
      const std::string path = "search_checkpoint.json";
      checkpoint_save(e.state(), path);
      state = checkpoint_resume(path);
      CHECK(search_state_to_json(state) == search_state_to_json(e.state()));
      std::remove(path.c_str());
      have = true;
    }
    REQUIRE(rounds < 1000);
  }
  CHECK(rounds > 2);
}

TEST_CASE("checkpoint: corrupt, foreign and mismatched documents are refused") {
  const SearchSpec s = make(Objective::MaxDiff, 4, 6, EquationSpec::ap_diff());
  SearchState partial;
  try {
    enumerate_max(s, {1, 10, 2});
    FAIL("expected budget exhaustion");
  } catch (const BudgetExceeded& e) {
    partial = e.state();
  }
  const std::string doc = search_state_to_json(partial);
  CHECK(search_state_to_json(search_state_from_json(doc)) == doc);
  CHECK_THROWS_AS(search_state_from_json(doc.substr(0, doc.size() / 2)), CheckpointError);
  CHECK_THROWS_AS(search_state_from_json(""), CheckpointError);
  CHECK_THROWS_AS(search_state_from_json("{\"format\": \"other\"}"), CheckpointError);
  std::string old = doc;
  old.replace(old.find("\"version\": 1"), 12, "\"version\": 0");
  try {
    search_state_from_json(old);
    FAIL("expected a version error");
  } catch (const CheckpointError& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
  SearchState other = partial;
  other.spec.n = 3;
  CHECK_THROWS_AS(enumerate_max(s, {}, &other), CheckpointError);
  CHECK_THROWS_AS(checkpoint_resume("no/such/checkpoint.json"), std::runtime_error);
}

TEST_CASE("sharpness trend for antisymmetric sets") {
  for (int n = 1; n <= 5; ++n) {
    const auto r = enumerate_max(make(Objective::MaxDiffAntisym, n, 4 * n, EquationSpec::ap_diff()), {});
    const Rational ratio = Rational(static_cast<long>(r.best)) / antisymmetric_bound(n);
    MESSAGE("n=" << n << " best=" << r.best << " ratio=" << ratio.to_double());
    CHECK(ratio <= 1);
  }
}

TEST_CASE("sweep examples") {
  CHECK(verify_main_sweep(6, 10).ok());
  CHECK(verify_main_sweep(2, 10).ok());
  const auto p = verify_principal_sweep(4, 6);
  CHECK(p.ok());
  CHECK(p.configurations > 0);
  CHECK(compression_property_scan(3, 6).ok());
  CHECK(compression_property_scan(2, 5).ok());
  CHECK(leqfis_scan(3, 6).ok());
  CHECK(recast_scan(3, 6).ok());
}

TEST_CASE("sweep bookkeeping") {
  // A, B within [0, 3) with |A| + |B| <= 2: 1 + 3 + 3 + 3 + 9 + 3 configurations.
  const auto r = verify_main_sweep(2, 3);
  CHECK(r.configurations == 22);
  REQUIRE(r.min_slack.has_value());
  CHECK(*r.min_slack == Rational(3, 5));
  CHECK(r.min_slack_config == "A={0} B={0}");
  const auto budgeted = recast_scan(3, 6, {1, 100});
  CHECK_FALSE(budgeted.complete);
  CHECK_FALSE(budgeted.ok());
  const auto a = leqfis_scan(4, 7, {1, UINT64_MAX}), b = leqfis_scan(4, 7, {4, UINT64_MAX});
  CHECK(sweep_to_structured(a) == sweep_to_structured(b));
}
