#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apx/counting.hpp"
#include "apx/numset.hpp"
#include "apx/rational.hpp"

namespace apx {

enum class Objective {
  MaxTUnion,       // max T(A, B, A u B) over A, B in [0, span) with |A| + |B| = n
  MaxDiff,         // max count(A, A, A) over A in [-span, span] with |A| = n
  MaxDiffAntisym,  // the same over antisymmetric A
};

std::optional<Objective> parse_objective(const std::string& s);
std::string objective_name(Objective o);

struct SearchSpec {
  Objective objective = Objective::MaxDiff;
  EquationSpec eq = EquationSpec::ap_diff();
  int n = 1;
  int span = 1;
  std::size_t witness_cap = 64;
  bool prune = true;

  /// Default span: 4n for the difference objectives, 2n for the union one.
  static int default_span(Objective o, int n) { return o == Objective::MaxTUnion ? 2 * n : 4 * n; }
};

/// A witness: chosen positions in the enumeration order (see positions()).
struct Configuration {
  NumSet a, b;  // b is empty for the difference objectives
};

/// Resumable progress: which work units are finished and what they found.
struct SearchState {
  SearchSpec spec;
  std::vector<std::uint64_t> completed;  // sorted unit indices
  std::int64_t best = -1;                // -1 while nothing was found
  std::vector<std::vector<int>> witnesses;  // position lists, lexicographic, capped
  std::uint64_t nodes = 0;
};

struct SearchOptions {
  unsigned jobs = 1;
  std::uint64_t budget = UINT64_MAX;  // enumeration nodes before stopping
  unsigned unit_depth = 2;
};

struct SearchResult {
  std::int64_t best = -1;
  std::vector<Configuration> witnesses;
  SearchState state;
  std::uint64_t units = 0;
};

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(SearchState s)
      : std::runtime_error("node budget exhausted; resume from the saved state"), state_(std::move(s)) {}
  const SearchState& state() const { return state_; }

 private:
  SearchState state_;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive maximization in canonical form. Throws BudgetExceeded (carrying
/// the state to resume from) when the budget runs out; DomainError on an
/// infeasible spec.
SearchResult enumerate_max(const SearchSpec& spec, const SearchOptions& opts,
                           const SearchState* resume = nullptr);

/// The configuration described by a position list.
Configuration decode_configuration(const SearchSpec& spec, const std::vector<int>& positions);
/// Objective value of a configuration.
std::uint64_t objective_value(const SearchSpec& spec, const Configuration& c);
/// Whether a position list is the canonical representative of its orbit.
bool is_canonical(const SearchSpec& spec, const std::vector<int>& positions);

std::string search_state_to_json(const SearchState& s);
/// Throws CheckpointError on corrupt documents or version mismatch.
SearchState search_state_from_json(const std::string& text);
void checkpoint_save(const SearchState& s, const std::string& path);
SearchState checkpoint_resume(const std::string& path);

std::string search_result_to_structured(const SearchResult& r);
std::string search_result_to_table(const SearchResult& r);

// ---------------------------------------------------------------------------
// Exhaustive oracle sweeps

struct SweepReport {
  std::string name;
  std::uint64_t configurations = 0;
  std::uint64_t violations = 0;
  std::optional<Rational> min_slack;
  std::string min_slack_config;
  std::string first_violation;
  bool complete = true;

  bool ok() const { return complete && violations == 0; }
};

struct SweepOptions {
  unsigned jobs = 1;
  std::uint64_t budget = UINT64_MAX;  // configurations
};

/// T(A, B, A u B) <= main_bound over A, B in [0, span) with |A| + |B| <= n_max.
SweepReport verify_main_sweep(int n_max, int span, const SweepOptions& o = {});
/// a - b = 2c counts over A in [-half_span, half_span] with |A| <= n_max
/// against the principal bound, and the antisymmetric bound when it applies.
SweepReport verify_principal_sweep(int n_max, int half_span, const SweepOptions& o = {});
/// a + b = c over A, B, C in [0, span), sizes <= size_cap and
/// max(|A|, |B|) <= |C| <= |A| + |B|, against plain_sum_bound.
SweepReport leqfis_scan(int size_cap, int span, const SweepOptions& o = {});
/// a + b = 2c over the same family without the size condition, against
/// size_majorant_bound.
SweepReport recast_scan(int size_cap, int span, const SweepOptions& o = {});
/// a + b = c counts never exceed those of consecutive blocks of the same
/// sizes (A and B starting at 0, C placed by compression_blocks).
SweepReport compression_property_scan(int size_cap, int span, const SweepOptions& o = {});

std::string sweep_to_structured(const SweepReport& r);
std::string sweep_to_table(const SweepReport& r);

}  // namespace apx
