#include <algorithm>
#include <atomic>
#include <bit>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "apx/constructions.hpp"
#include "apx/search.hpp"

namespace apx {
namespace {

using Mask = std::uint32_t;

std::vector<Mask> masks_up_to(int bits, int max_size) {
  std::vector<Mask> out;
  for (Mask m = 0; m < (Mask{1} << bits); ++m)
    if (std::popcount(m) <= max_size) out.push_back(m);
  return out;
}

std::vector<long> elements(Mask m, long offset) {
  std::vector<long> out;
  for (int i = 0; m >> i; ++i)
    if ((m >> i) & 1u) out.push_back(i + offset);
  return out;
}

std::string set_text(Mask m, long offset) {
  std::string out = "{";
  bool first = true;
  for (long v : elements(m, offset)) {
    out += (first ? "" : ",") + std::to_string(v);
    first = false;
  }
  return out + "}";
}

constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

/// Per-thread tallies. Classes group configurations sharing one bound; slack
/// is tracked only for configurations with a positive count.
struct Tally {
  struct Best {
    std::int64_t count = -1;
    std::uint64_t index = kNone;
  };
  std::vector<Best> best;
  std::uint64_t configurations = 0;
  std::uint64_t violations = 0;
  std::uint64_t first_violation = kNone;
  const std::vector<std::int64_t>* ceiling = nullptr;  // floor of each class bound

  void record(std::size_t cls, std::int64_t count, std::uint64_t index) {
    auto& b = best[cls];
    if (count > 0 && (count > b.count || (count == b.count && index < b.index))) b = {count, index};
    if (count > (*ceiling)[cls]) {
      ++violations;
      first_violation = std::min(first_violation, index);
    }
  }
};

using Kernel = std::function<void(std::uint64_t outer, Tally&)>;

SweepReport run_sweep(std::string name, const std::vector<Rational>& bounds, std::uint64_t outer_count,
                      const Kernel& kernel, const std::function<std::string(std::uint64_t)>& describe,
                      const SweepOptions& opts) {
  std::vector<std::int64_t> ceiling;
  for (const auto& b : bounds) ceiling.push_back(to_int64(floor(b)));

  const unsigned jobs = std::max(1u, opts.jobs);
  std::vector<Tally> tallies(jobs);
  for (auto& t : tallies) {
    t.best.resize(bounds.size());
    t.ceiling = &ceiling;
  }
  std::atomic<std::uint64_t> next(0), seen(0);
  std::atomic<bool> stopped(false);
  auto worker = [&](Tally& t) {
    for (;;) {
      if (seen.load() >= opts.budget) {
        stopped = true;
        return;
      }
      const std::uint64_t i = next.fetch_add(1);
      if (i >= outer_count) return;
      const auto before = t.configurations;
      kernel(i, t);
      seen += t.configurations - before;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker, std::ref(tallies[j]));
  worker(tallies[0]);
  for (auto& th : pool) th.join();

  SweepReport r;
  r.name = std::move(name);
  r.complete = !stopped || next.load() >= outer_count;
  std::vector<Tally::Best> best(bounds.size());
  std::uint64_t first = kNone;
  for (const auto& t : tallies) {
    r.configurations += t.configurations;
    r.violations += t.violations;
    first = std::min(first, t.first_violation);
    for (std::size_t c = 0; c < bounds.size(); ++c) {
      const auto& b = t.best[c];
      if (b.count > best[c].count || (b.count == best[c].count && b.index < best[c].index)) best[c] = b;
    }
  }
  if (first != kNone) r.first_violation = describe(first);
  std::uint64_t slack_index = kNone;
  for (std::size_t c = 0; c < bounds.size(); ++c) {
    if (best[c].count < 0) continue;
    const Rational slack = bounds[c] - Rational(static_cast<long>(best[c].count));
    if (!r.min_slack || slack < *r.min_slack || (slack == *r.min_slack && best[c].index < slack_index)) {
      r.min_slack = slack;
      slack_index = best[c].index;
    }
  }
  if (slack_index != kNone) r.min_slack_config = describe(slack_index);
  return r;
}

/// Bit i of the result is bit i/2 of m for even i.
std::uint64_t doubled(Mask m) {
  std::uint64_t out = 0;
  for (int i = 0; m >> i; ++i)
    if ((m >> i) & 1u) out |= std::uint64_t{1} << (2 * i);
  return out;
}

std::int64_t plain_sum_count(Mask a, Mask b, Mask c) {
  std::int64_t total = 0;
  for (int i = 0; a >> i; ++i)
    if ((a >> i) & 1u) total += std::popcount((std::uint64_t{b} << i) & c);
  return total;
}

std::int64_t ap_sum_count(Mask a, Mask b, std::uint64_t c_doubled) {
  std::int64_t total = 0;
  for (int i = 0; a >> i; ++i)
    if ((a >> i) & 1u) total += std::popcount((std::uint64_t{b} << i) & c_doubled);
  return total;
}

void check_span(int span, int limit) {
  if (span < 1 || span > limit) throw DomainError("sweep span must be in [1, " + std::to_string(limit) + "]");
}

/// Sweeps over triples of masks drawn from one list; outer index is |A| mask.
struct TripleFamily {
  std::vector<Mask> masks;
  int cap;

  std::size_t cls(Mask a, Mask b, Mask c) const {
    const auto m = static_cast<std::size_t>(cap + 1);
    return (static_cast<std::size_t>(std::popcount(a)) * m + static_cast<std::size_t>(std::popcount(b))) * m +
           static_cast<std::size_t>(std::popcount(c));
  }
  std::uint64_t index(std::size_t ia, std::size_t ib, std::size_t ic) const {
    const std::uint64_t m = masks.size();
    return (ia * m + ib) * m + ic;
  }
  std::string describe(std::uint64_t idx) const {
    const std::uint64_t m = masks.size();
    return "A=" + set_text(masks[idx / (m * m)], 0) + " B=" + set_text(masks[(idx / m) % m], 0) +
           " C=" + set_text(masks[idx % m], 0);
  }
};

}  // namespace

SweepReport verify_main_sweep(int n_max, int span, const SweepOptions& o) {
  check_span(span, 24);
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  const auto masks = masks_up_to(span, n_max);
  const auto m = static_cast<std::size_t>(n_max + 1);
  std::vector<Rational> bounds(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) bounds[a * m + b] = main_bound(static_cast<long>(a), static_cast<long>(b));
  auto kernel = [&](std::uint64_t ia, Tally& t) {
    const Mask a = masks[ia];
    const int na = std::popcount(a);
    for (std::size_t ib = 0; ib < masks.size(); ++ib) {
      const Mask b = masks[ib];
      const int nb = std::popcount(b);
      if (na + nb > n_max) continue;
      ++t.configurations;
      const std::int64_t count = ap_sum_count(a, b, doubled(a | b));
      t.record(static_cast<std::size_t>(na) * m + static_cast<std::size_t>(nb), count, ia * masks.size() + ib);
    }
  };
  auto describe = [&](std::uint64_t idx) {
    return "A=" + set_text(masks[idx / masks.size()], 0) + " B=" + set_text(masks[idx % masks.size()], 0);
  };
  return run_sweep("main-scan", bounds, masks.size(), kernel, describe, o);
}

SweepReport verify_principal_sweep(int n_max, int half_span, const SweepOptions& o) {
  check_span(2 * half_span + 1, 25);
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  const int width = 2 * half_span + 1;
  const auto masks = masks_up_to(width, n_max);
  const auto m = static_cast<std::size_t>(n_max + 1);
  // Classes [0, m): principal bound by size; [m, 2m): antisymmetric bound.
  std::vector<Rational> bounds(2 * m);
  for (std::size_t n = 0; n < m; ++n) {
    bounds[n] = principal_bound(static_cast<long>(n));
    bounds[m + n] = antisymmetric_bound(static_cast<long>(n));
  }
  auto mirror = [&](Mask a) {
    Mask out = 0;
    for (int i = 0; i < width; ++i)
      if ((a >> i) & 1u) out |= Mask{1} << (width - 1 - i);
    return out;
  };
  auto kernel = [&](std::uint64_t ia, Tally& t) {
    const Mask a = masks[ia];
    const auto n = static_cast<std::size_t>(std::popcount(a));
    ++t.configurations;
    // a - b = 2c  <=>  a = b + 2c: shift A by each b and test against the doubled C.
    const auto xs = elements(a, -half_span);
    std::int64_t count = 0;
    for (long x : xs)
      for (long y : xs) {
        const long d = x - y;
        if (d % 2 == 0 && d / 2 >= -half_span && d / 2 <= half_span && ((a >> (d / 2 + half_span)) & 1u)) ++count;
      }
    t.record(n, count, ia);
    if ((a & mirror(a)) == 0) t.record(m + n, count, ia);
  };
  auto describe = [&](std::uint64_t idx) { return "A=" + set_text(masks[idx], -half_span); };
  return run_sweep("principal-scan", bounds, masks.size(), kernel, describe, o);
}

SweepReport leqfis_scan(int size_cap, int span, const SweepOptions& o) {
  check_span(span, 16);
  TripleFamily fam{masks_up_to(span, size_cap), size_cap};
  const auto m = static_cast<std::size_t>(size_cap + 1);
  std::vector<Rational> bounds(m * m * m, Rational(0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = std::max(a, b); c <= std::min(a + b, m - 1); ++c)
        bounds[(a * m + b) * m + c] = plain_sum_bound(static_cast<long>(a), static_cast<long>(b), static_cast<long>(c));
  auto kernel = [&](std::uint64_t ia, Tally& t) {
    const Mask a = fam.masks[ia];
    const int na = std::popcount(a);
    for (std::size_t ib = 0; ib < fam.masks.size(); ++ib) {
      const Mask b = fam.masks[ib];
      const int nb = std::popcount(b);
      for (std::size_t ic = 0; ic < fam.masks.size(); ++ic) {
        const Mask c = fam.masks[ic];
        const int nc = std::popcount(c);
        if (nc < std::max(na, nb) || nc > na + nb) continue;
        ++t.configurations;
        t.record(fam.cls(a, b, c), plain_sum_count(a, b, c), fam.index(ia, ib, ic));
      }
    }
  };
  return run_sweep("leqfis-scan", bounds, fam.masks.size(), kernel,
                   [&](std::uint64_t i) { return fam.describe(i); }, o);
}

SweepReport recast_scan(int size_cap, int span, const SweepOptions& o) {
  check_span(span, 16);
  TripleFamily fam{masks_up_to(span, size_cap), size_cap};
  const auto m = static_cast<std::size_t>(size_cap + 1);
  std::vector<Rational> bounds(m * m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c)
        bounds[(a * m + b) * m + c] =
            size_majorant_bound(static_cast<long>(a), static_cast<long>(b), static_cast<long>(c));
  std::vector<std::uint64_t> twice;
  for (Mask c : fam.masks) twice.push_back(doubled(c));
  auto kernel = [&](std::uint64_t ia, Tally& t) {
    const Mask a = fam.masks[ia];
    for (std::size_t ib = 0; ib < fam.masks.size(); ++ib) {
      const Mask b = fam.masks[ib];
      for (std::size_t ic = 0; ic < fam.masks.size(); ++ic) {
        ++t.configurations;
        t.record(fam.cls(a, b, fam.masks[ic]), ap_sum_count(a, b, twice[ic]), fam.index(ia, ib, ic));
      }
    }
  };
  return run_sweep("recast-scan", bounds, fam.masks.size(), kernel,
                   [&](std::uint64_t i) { return fam.describe(i); }, o);
}

SweepReport compression_property_scan(int size_cap, int span, const SweepOptions& o) {
  check_span(span, 16);
  TripleFamily fam{masks_up_to(span, size_cap), size_cap};
  const auto m = static_cast<std::size_t>(size_cap + 1);
  std::vector<Rational> bounds(m * m * m, Rational(0));
  for (std::size_t a = 1; a < m; ++a)
    for (std::size_t b = 1; b < m; ++b)
      for (std::size_t c = 1; c < m; ++c) {
        const auto na = static_cast<long>(a), nb = static_cast<long>(b), nc = static_cast<long>(c);
        const auto blocks = compression_blocks(na, nb, nc, Rational(na - 1, 2), Rational(nb - 1, 2));
        bounds[(a * m + b) * m + c] =
            Rational(static_cast<unsigned long>(count_solutions(blocks.a, blocks.b, blocks.c, EquationSpec::plain_sum())));
      }
  auto kernel = [&](std::uint64_t ia, Tally& t) {
    const Mask a = fam.masks[ia];
    for (std::size_t ib = 0; ib < fam.masks.size(); ++ib) {
      const Mask b = fam.masks[ib];
      for (std::size_t ic = 0; ic < fam.masks.size(); ++ic) {
        const Mask c = fam.masks[ic];
        ++t.configurations;
        t.record(fam.cls(a, b, c), plain_sum_count(a, b, c), fam.index(ia, ib, ic));
      }
    }
  };
  return run_sweep("compression-scan", bounds, fam.masks.size(), kernel,
                   [&](std::uint64_t i) { return fam.describe(i); }, o);
}

std::string sweep_to_structured(const SweepReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["complete"] = r.complete;
  j["configurations"] = r.configurations;
  j["violations"] = r.violations;
  if (r.min_slack) {
    j["min_slack"] = r.min_slack->str();
    j["min_slack_config"] = r.min_slack_config;
  } else {
    j["min_slack"] = nullptr;
  }
  if (!r.first_violation.empty()) j["first_violation"] = r.first_violation;
  j["ok"] = r.ok();
  return j.dump(2) + "\n";
}

std::string sweep_to_table(const SweepReport& r) {
  std::ostringstream out;
  out << "sweep           " << r.name << (r.complete ? "" : " (incomplete: budget)") << "\n";
  out << "configurations  " << r.configurations << "\n";
  out << "violations      " << r.violations << "\n";
  if (r.min_slack) out << "min slack       " << r.min_slack->str() << " at " << r.min_slack_config << "\n";
  if (!r.first_violation.empty()) out << "first violation " << r.first_violation << "\n";
  out << "result          " << (r.ok() ? "ok" : "FAILED") << "\n";
  return out.str();
}

}  // namespace apx
