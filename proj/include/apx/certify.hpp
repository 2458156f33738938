#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apx/interval.hpp"
#include "apx/rational.hpp"

namespace apx {

enum class CertTarget {
  LemmaInequality,  // f over {x >= 0, 1/2 <= s <= 1}
  Claim1,           // f(x0, x1, x1, x0) over {x >= 0, 1/4 <= x0 + x1 <= 1/2}
  Claim2U,          // u over the triangle part on the vertex-(1/4, 1/4) side of x1 = phi x0
  Claim2V,          // v over the part on the x0-axis side
};

std::optional<CertTarget> parse_cert_target(std::string_view name);
std::string target_name(CertTarget t);
/// The value the target is claimed not to exceed (3/20 or -1/10).
Rational default_threshold(CertTarget t);

/// Bracket lo < (3 - sqrt 5)/2 < hi with denominators at most max_den,
/// certified by the sign of x^2 - 3x + 1.
std::pair<Rational, Rational> golden_bracket(std::uint64_t max_den);

struct Box {
  std::vector<Interval> dims;
  std::vector<std::string> labels;
};

enum class FormKind { Outside, Frame, Centered, Tangent };

struct LeafRecord {
  std::vector<Rational> lo, hi;
  FormKind form = FormKind::Outside;
  int piece = -1;
  int frame = -1;
  std::vector<Rational> base;  // expansion point (frame coordinates for Frame)
  Rational bound;              // certified upper bound on the leaf (unused when Outside)
};

struct Witness {
  std::vector<Rational> point;
  Rational value;
  std::string source;  // "seed" or "leaf"
};

struct CertStats {
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
  std::uint64_t outside = 0;
  std::uint64_t near_maximal = 0;
  unsigned max_depth = 0;
  std::uint64_t frame_leaves = 0, centered_leaves = 0, tangent_leaves = 0;
};

struct Certificate {
  CertTarget target = CertTarget::LemmaInequality;
  Rational threshold, tol;
  std::vector<std::string> labels;
  std::vector<Rational> root_lo, root_hi;
  std::string region;  // human-readable description
  std::string tree;    // preorder: '1' split, '0' leaf
  std::vector<LeafRecord> leaves;
  std::vector<Witness> witnesses;
  CertStats stats;
  Rational max_bound;  // largest recorded leaf bound
};

struct CertifyOptions {
  std::optional<Rational> threshold;  // default_threshold(target) when unset
  Rational tol = Rational(1, 1000000000);
  std::uint64_t budget = 50'000'000;  // node budget
  unsigned jobs = 1;
  unsigned unit_depth = 10;  // work units are subtrees rooted at this depth
  unsigned max_depth = 90;
};

enum class CertStatus { Certified, BudgetExhausted, Unresolved };

struct CertifyResult {
  CertStatus status = CertStatus::Unresolved;
  Certificate certificate;  // complete only when Certified
  std::vector<Box> surviving;  // boxes that could not be closed (capped)
  std::uint64_t nodes = 0;
  bool ok() const { return status == CertStatus::Certified; }
  /// Best witness value (from the certificate's witness list).
  std::optional<Witness> best_witness() const;
};

/// Branch-and-bound proof that sup(target) <= threshold + tol over the domain.
CertifyResult certify_sup(CertTarget target, const CertifyOptions& options);

std::string certificate_to_json(const Certificate& c);
/// Throws ParseError on malformed or incompatible documents.
Certificate certificate_from_json(const std::string& text);

struct ReplayReport {
  bool ok = false;
  std::string message;
  std::uint64_t leaves_checked = 0;
  Rational max_bound;
};

/// Single-threaded re-verification: rebuilds the subdivision from the tree,
/// checks that it reproduces the recorded leaf boxes, and recomputes every
/// leaf bound exactly.
ReplayReport replay_certificate(const Certificate& c);

}  // namespace apx
