#include "apx/search.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace apx {

std::optional<Objective> parse_objective(const std::string& s) {
  if (s == "max-t-union") return Objective::MaxTUnion;
  if (s == "max-diff") return Objective::MaxDiff;
  if (s == "max-diff-antisym") return Objective::MaxDiffAntisym;
  return std::nullopt;
}

std::string objective_name(Objective o) {
  switch (o) {
    case Objective::MaxTUnion: return "max-t-union";
    case Objective::MaxDiff: return "max-diff";
    case Objective::MaxDiffAntisym: return "max-diff-antisym";
  }
  return "?";
}

namespace {

bool is_union(const SearchSpec& s) { return s.objective == Objective::MaxTUnion; }

int position_count(const SearchSpec& s) { return is_union(s) ? 2 * s.span : 2 * s.span + 1; }

/// a (+|-) b = (p/q) c on machine integers.
struct SmallEquation {
  bool diff;
  long p, q;
};

SmallEquation small_equation(const EquationSpec& eq) {
  const auto& k = eq.coefficient();
  if (!mpz_fits_slong_p(k.raw().get_num_mpz_t()) || !mpz_fits_slong_p(k.raw().get_den_mpz_t()) ||
      abs(k) > Rational(1 << 20) || k.den() > (1 << 20))
    throw DomainError("equation coefficient too large for search: " + k.str());
  return {eq.is_difference(), mpz_get_si(k.raw().get_num_mpz_t()), mpz_get_si(k.raw().get_den_mpz_t())};
}

/// Membership over a window of integers.
class Window {
 public:
  Window(long lo, long hi) : lo_(lo), bits_(static_cast<std::size_t>(hi - lo + 1), 0) {}
  void set(long v) { bits_[static_cast<std::size_t>(v - lo_)] = 1; }
  bool has(long v) const {
    const long i = v - lo_;
    return i >= 0 && i < static_cast<long>(bits_.size()) && bits_[static_cast<std::size_t>(i)] != 0;
  }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

 private:
  long lo_;
  std::vector<char> bits_;
};

std::uint64_t count_small(const std::vector<long>& a, const std::vector<long>& b, const Window& c,
                          const SmallEquation& e) {
  std::uint64_t total = 0;
  for (long x : a) {
    for (long y : b) {
      const long v = e.q * (e.diff ? x - y : x + y);
      if (v % e.p == 0 && c.has(v / e.p)) ++total;
    }
  }
  return total;
}

class Evaluator {
 public:
  explicit Evaluator(const SearchSpec& spec)
      : spec_(spec), eq_(small_equation(spec.eq)), positions_(position_count(spec)) {
    const auto kind = spec.eq.kind();
    prunable_ = spec.prune && (kind == EquationKind::ApSum || kind == EquationKind::ApDiff ||
                               kind == EquationKind::PlainSum);
    const int n = spec.n;
    table_.assign(static_cast<std::size_t>((n + 1) * (n + 1) * (n + 1)), 0);
    for (int x = 0; x <= n; ++x)
      for (int y = 0; y <= n; ++y)
        for (int z = 0; z <= n; ++z)
          table_[index(x, y, z)] = to_int64(floor(majorant(x, y, z) + Rational(1, 4)));
  }

  int positions() const { return positions_; }
  bool prunable() const { return prunable_; }

  long value(int pos) const {
    if (is_union(spec_)) return pos < spec_.span ? pos : pos - spec_.span;
    return pos - spec_.span;
  }
  int mirror(int pos) const { return 2 * spec_.span - pos; }

  /// Whether pos may join `chosen` (antisymmetry only).
  bool admissible(const std::vector<int>& chosen, int pos) const {
    if (spec_.objective != Objective::MaxDiffAntisym) return true;
    if (pos == spec_.span) return false;
    const int m = mirror(pos);
    return std::find(chosen.begin(), chosen.end(), m) == chosen.end();
  }

  std::uint64_t value_of(const std::vector<int>& pos) const {
    if (is_union(spec_)) {
      std::vector<long> a, b;
      Window c(0, spec_.span - 1);
      split(pos, a, b, c);
      return count_small(a, b, c, eq_);
    }
    std::vector<long> a;
    Window c(-spec_.span, spec_.span);
    for (int p : pos) {
      a.push_back(value(p));
      c.set(value(p));
    }
    return count_small(a, a, c, eq_);
  }

  /// Exact count of the placed part plus the recasting bound for every role
  /// pattern that involves an element still to be placed.
  std::int64_t optimistic(const std::vector<int>& pos) const {
    const int k = static_cast<int>(pos.size());
    const int r = spec_.n - k;
    if (is_union(spec_)) {
      std::vector<long> a, b;
      Window c(0, spec_.span - 1);
      split(pos, a, b, c);
      const int last = pos.back();
      int a_rem = 0, b_rem = 0;
      if (last < spec_.span) {
        a_rem = std::min(r, spec_.span - 1 - last);
        b_rem = std::min(r, spec_.span);
      } else {
        b_rem = std::min(r, 2 * spec_.span - 1 - last);
      }
      const int sa[2] = {static_cast<int>(a.size()), a_rem};
      const int sb[2] = {static_cast<int>(b.size()), b_rem};
      const int sc[2] = {static_cast<int>(c.count()), r};
      std::int64_t total = static_cast<std::int64_t>(count_small(a, b, c, eq_));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int l = 0; l < 2; ++l)
            if (i + j + l > 0) total += table_[index(sa[i], sb[j], sc[l])];
      return total;
    }
    std::vector<long> a;
    Window c(-spec_.span, spec_.span);
    for (int p : pos) {
      a.push_back(value(p));
      c.set(value(p));
    }
    const int sz[2] = {k, r};
    std::int64_t total = static_cast<std::int64_t>(count_small(a, a, c, eq_));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l)
          if (i + j + l > 0) total += table_[index(sz[i], sz[j], sz[l])];
    return total;
  }

  bool canonical(const std::vector<int>& pos) const {
    long g = 0;
    if (is_union(spec_)) {
      const bool translate = spec_.eq.kind() == EquationKind::ApSum;
      long lo = spec_.span;
      for (int p : pos) lo = std::min(lo, value(p));
      if (translate && lo != 0) return false;
      for (int p : pos) g = std::gcd(g, value(p));
      return g <= 1;
    }
    for (int p : pos) g = std::gcd(g, std::labs(value(p)));
    if (g > 1) return false;
    std::vector<int> neg;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) neg.push_back(mirror(*it));
    return !std::lexicographical_compare(pos.begin(), pos.end(), neg.begin(), neg.end());
  }

 private:
  std::size_t index(int x, int y, int z) const {
    const auto m = static_cast<std::size_t>(spec_.n + 1);
    return (static_cast<std::size_t>(x) * m + static_cast<std::size_t>(y)) * m + static_cast<std::size_t>(z);
  }

  void split(const std::vector<int>& pos, std::vector<long>& a, std::vector<long>& b, Window& c) const {
    for (int p : pos) {
      const long v = value(p);
      (p < spec_.span ? a : b).push_back(v);
      c.set(v);
    }
  }

  const SearchSpec& spec_;
  SmallEquation eq_;
  int positions_;
  bool prunable_ = false;
  std::vector<std::int64_t> table_;
};

struct UnitResult {
  std::int64_t best = -1;
  std::vector<std::vector<int>> witnesses;
  std::uint64_t nodes = 0;
};

class UnitSearch {
 public:
  UnitSearch(const SearchSpec& spec, const Evaluator& ev, std::atomic<std::int64_t>& incumbent)
      : spec_(spec), ev_(ev), incumbent_(incumbent) {}

  UnitResult run(const std::vector<int>& prefix) {
    res_ = UnitResult{};
    chosen_ = prefix;
    const int next = prefix.empty() ? 0 : prefix.back() + 1;
    dfs(next);
    return std::move(res_);
  }

 private:
  void dfs(int next) {
    ++res_.nodes;
    const int k = static_cast<int>(chosen_.size());
    if (k == spec_.n) {
      leaf();
      return;
    }
    if (ev_.prunable() && k > 0 && ev_.optimistic(chosen_) < incumbent_.load(std::memory_order_relaxed)) return;
    const int last = ev_.positions() - (spec_.n - k);
    for (int p = next; p <= last; ++p) {
      if (!ev_.admissible(chosen_, p)) continue;
      chosen_.push_back(p);
      dfs(p + 1);
      chosen_.pop_back();
    }
  }

  void leaf() {
    if (!ev_.canonical(chosen_)) return;
    const auto v = static_cast<std::int64_t>(ev_.value_of(chosen_));
    if (v > res_.best) {
      res_.best = v;
      res_.witnesses.clear();
      std::int64_t cur = incumbent_.load();
      while (cur < v && !incumbent_.compare_exchange_weak(cur, v)) {
      }
    }
    if (v == res_.best && res_.witnesses.size() < spec_.witness_cap) res_.witnesses.push_back(chosen_);
  }

  const SearchSpec& spec_;
  const Evaluator& ev_;
  std::atomic<std::int64_t>& incumbent_;
  UnitResult res_;
  std::vector<int> chosen_;
};

std::vector<std::vector<int>> make_units(const SearchSpec& spec, const Evaluator& ev, unsigned depth) {
  const int d = std::min<int>(static_cast<int>(depth), spec.n);
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(cur.size()) == d) {
      out.push_back(cur);
      return;
    }
    const int last = ev.positions() - (spec.n - static_cast<int>(cur.size()));
    for (int p = next; p <= last; ++p) {
      if (!ev.admissible(cur, p)) continue;
      cur.push_back(p);
      self(self, p + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

void merge_into(SearchState& s, std::int64_t best, const std::vector<std::vector<int>>& witnesses) {
  if (best < 0 || best < s.best) return;
  if (best > s.best) {
    s.best = best;
    s.witnesses.clear();
  }
  std::vector<std::vector<int>> merged;
  std::merge(s.witnesses.begin(), s.witnesses.end(), witnesses.begin(), witnesses.end(), std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  if (merged.size() > s.spec.witness_cap) merged.resize(s.spec.witness_cap);
  s.witnesses = std::move(merged);
}

void validate(const SearchSpec& spec) {
  if (spec.n < 1) throw DomainError("search needs n >= 1");
  if (spec.span < 1) throw DomainError("search needs span >= 1");
  if (spec.witness_cap < 1) throw DomainError("witness cap must be positive");
  const int available = spec.objective == Objective::MaxDiffAntisym ? spec.span : position_count(spec);
  if (spec.n > available)
    throw DomainError("n = " + std::to_string(spec.n) + " exceeds the " + std::to_string(available) +
                      " available positions");
  if (spec.objective != Objective::MaxTUnion && !spec.eq.is_difference() && spec.eq.kind() != EquationKind::PlainSum &&
      spec.eq.kind() != EquationKind::ApSum)
    throw DomainError("unsupported equation for this objective");
}

}  // namespace

Configuration decode_configuration(const SearchSpec& spec, const std::vector<int>& positions) {
  std::vector<Rational> a, b;
  for (int p : positions) {
    if (is_union(spec)) {
      (p < spec.span ? a : b).emplace_back(static_cast<long>(p < spec.span ? p : p - spec.span));
    } else {
      a.emplace_back(static_cast<long>(p - spec.span));
    }
  }
  return {NumSet(std::move(a)), NumSet(std::move(b))};
}

std::uint64_t objective_value(const SearchSpec& spec, const Configuration& c) {
  if (is_union(spec)) return count_solutions(c.a, c.b, set_union(c.a, c.b), spec.eq);
  return count_solutions(c.a, c.a, c.a, spec.eq);
}

bool is_canonical(const SearchSpec& spec, const std::vector<int>& positions) {
  return Evaluator(spec).canonical(positions);
}

SearchResult enumerate_max(const SearchSpec& spec, const SearchOptions& opts, const SearchState* resume) {
  validate(spec);
  const Evaluator ev(spec);
  const auto units = make_units(spec, ev, opts.unit_depth);

  SearchState state;
  state.spec = spec;
  if (resume) {
    const SearchSpec& r = resume->spec;
    if (r.objective != spec.objective || !(r.eq == spec.eq) || r.n != spec.n || r.span != spec.span ||
        r.witness_cap != spec.witness_cap || r.prune != spec.prune)
      throw CheckpointError("checkpoint was written for a different search");
    for (auto u : resume->completed)
      if (u >= units.size()) throw CheckpointError("checkpoint refers to unit " + std::to_string(u) + " beyond the search");
    state = *resume;
  }
  std::vector<char> done(units.size(), 0);
  for (auto u : state.completed) done[u] = 1;

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (!done[i]) todo.push_back(i);

  std::atomic<std::int64_t> incumbent(state.best);
  std::atomic<std::uint64_t> nodes(0);
  std::atomic<std::size_t> next(0);
  std::vector<std::optional<UnitResult>> results(units.size());
  auto worker = [&] {
    UnitSearch search(spec, ev, incumbent);
    for (;;) {
      if (nodes.load() >= opts.budget) return;
      const std::size_t t = next.fetch_add(1);
      if (t >= todo.size()) return;
      UnitResult r = search.run(units[todo[t]]);
      nodes += r.nodes;
      results[todo[t]] = std::move(r);
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(std::max<std::size_t>(todo.size(), 1))));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool complete = true;
  for (std::size_t i : todo) {
    if (!results[i]) {
      complete = false;
      continue;
    }
    merge_into(state, results[i]->best, results[i]->witnesses);
    state.completed.push_back(i);
    state.nodes += results[i]->nodes;
  }
  std::sort(state.completed.begin(), state.completed.end());
  if (!complete) throw BudgetExceeded(state);

  SearchResult out;
  out.best = state.best;
  out.units = units.size();
  for (const auto& w : state.witnesses) out.witnesses.push_back(decode_configuration(spec, w));
  out.state = std::move(state);
  return out;
}

// ---------------------------------------------------------------------------
// State documents

namespace {

constexpr int kStateVersion = 1;
using nlohmann::ordered_json;

std::string eq_name(const EquationSpec& e) {
  switch (e.kind()) {
    case EquationKind::ApSum: return "ap";
    case EquationKind::ApDiff: return "diff";
    case EquationKind::PlainSum: return "sum";
    case EquationKind::LambdaSum: return "lambda-sum";
    case EquationKind::LambdaDiff: return "lambda-diff";
  }
  return "?";
}

EquationSpec eq_of(const std::string& name, const std::string& lambda) {
  if (name == "ap") return EquationSpec::ap_sum();
  if (name == "diff") return EquationSpec::ap_diff();
  if (name == "sum") return EquationSpec::plain_sum();
  if (name == "lambda-sum") return EquationSpec::lambda_sum(Rational::parse(lambda));
  if (name == "lambda-diff") return EquationSpec::lambda_diff(Rational::parse(lambda));
  throw CheckpointError("unknown equation '" + name + "'");
}

std::uint64_t parse_u64(const ordered_json& j) {
  const std::string s = j.get<std::string>();
  if (s.empty() || s.size() > 19 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw CheckpointError("malformed integer '" + s + "'");
  return std::stoull(s);
}

ordered_json spec_json(const SearchSpec& s) {
  return {{"objective", objective_name(s.objective)},
          {"equation", eq_name(s.eq)},
          {"lambda", s.eq.coefficient().str()},
          {"n", std::to_string(s.n)},
          {"span", std::to_string(s.span)},
          {"witness_cap", std::to_string(s.witness_cap)},
          {"prune", s.prune}};
}

}  // namespace

std::string search_state_to_json(const SearchState& s) {
  ordered_json j;
  j["format"] = "apx-search-state";
  j["version"] = kStateVersion;
  j["spec"] = spec_json(s.spec);
  auto completed = ordered_json::array();
  for (auto u : s.completed) completed.push_back(std::to_string(u));
  j["completed"] = std::move(completed);
  j["best"] = std::to_string(s.best);
  auto wit = ordered_json::array();
  for (const auto& w : s.witnesses) {
    auto row = ordered_json::array();
    for (int p : w) row.push_back(std::to_string(p));
    wit.push_back(std::move(row));
  }
  j["witnesses"] = std::move(wit);
  j["nodes"] = std::to_string(s.nodes);
  return j.dump(1) + "\n";
}

SearchState search_state_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw CheckpointError("checkpoint is corrupt (not a complete JSON document)");
  }
  try {
    if (!j.is_object() || j.value("format", "") != "apx-search-state") throw CheckpointError("not a search checkpoint");
    const int version = j.at("version").get<int>();
    if (version != kStateVersion)
      throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kStateVersion) + ")");
    SearchState s;
    const auto& sp = j.at("spec");
    const auto obj = parse_objective(sp.at("objective").get<std::string>());
    if (!obj) throw CheckpointError("unknown objective in checkpoint");
    s.spec.objective = *obj;
    s.spec.eq = eq_of(sp.at("equation").get<std::string>(), sp.at("lambda").get<std::string>());
    s.spec.n = static_cast<int>(parse_u64(sp.at("n")));
    s.spec.span = static_cast<int>(parse_u64(sp.at("span")));
    s.spec.witness_cap = parse_u64(sp.at("witness_cap"));
    s.spec.prune = sp.at("prune").get<bool>();
    for (const auto& u : j.at("completed")) s.completed.push_back(parse_u64(u));
    if (!std::is_sorted(s.completed.begin(), s.completed.end()) ||
        std::adjacent_find(s.completed.begin(), s.completed.end()) != s.completed.end())
      throw CheckpointError("completed units are not strictly increasing");
    const std::string best = j.at("best").get<std::string>();
    s.best = best == "-1" ? -1 : static_cast<std::int64_t>(parse_u64(j.at("best")));
    for (const auto& w : j.at("witnesses")) {
      std::vector<int> row;
      for (const auto& p : w) row.push_back(static_cast<int>(parse_u64(p)));
      s.witnesses.push_back(std::move(row));
    }
    s.nodes = parse_u64(j.at("nodes"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint is corrupt: ") + e.what());
  } catch (const ParseError& e) {
    throw CheckpointError(std::string("checkpoint is corrupt: ") + e.what());
  } catch (const DomainError& e) {
    throw CheckpointError(std::string("checkpoint is corrupt: ") + e.what());
  }
}

void checkpoint_save(const SearchState& s, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + tmp + "'");
    out << search_state_to_json(s);
    if (!out) throw std::runtime_error("failed writing checkpoint '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot move checkpoint into '" + path + "'");
}

SearchState checkpoint_resume(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return search_state_from_json(buf.str());
}

namespace {

ordered_json set_json(const NumSet& s) {
  auto a = ordered_json::array();
  for (const auto& x : s) a.push_back(to_int64(x));
  return a;
}

std::string set_text(const NumSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + s[i].str();
  return out + "}";
}

}  // namespace

std::string search_result_to_structured(const SearchResult& r) {
  ordered_json j;
  const SearchSpec& s = r.state.spec;
  j["objective"] = objective_name(s.objective);
  j["equation"] = s.eq.name();
  j["n"] = s.n;
  j["span"] = s.span;
  j["best"] = r.best;
  j["witness_count"] = r.witnesses.size();
  j["witness_cap"] = s.witness_cap;
  auto w = ordered_json::array();
  for (const auto& c : r.witnesses) {
    if (is_union(s))
      w.push_back({{"A", set_json(c.a)}, {"B", set_json(c.b)}});
    else
      w.push_back({{"A", set_json(c.a)}});
  }
  j["witnesses"] = std::move(w);
  return j.dump(2) + "\n";
}

std::string search_result_to_table(const SearchResult& r) {
  const SearchSpec& s = r.state.spec;
  std::ostringstream out;
  out << "objective  " << objective_name(s.objective) << "\n";
  out << "equation   " << s.eq.name() << "\n";
  out << "n          " << s.n << "\n";
  out << "span       " << s.span << "\n";
  out << "best       " << r.best << "\n";
  out << "witnesses  " << r.witnesses.size() << (r.witnesses.size() == s.witness_cap ? " (cap reached)" : "") << "\n";
  for (const auto& c : r.witnesses) {
    out << "  A=" << set_text(c.a);
    if (is_union(s)) out << " B=" << set_text(c.b);
    out << "\n";
  }
  return out.str();
}

}  // namespace apx
