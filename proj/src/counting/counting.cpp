#include "apx/counting.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace apx {

EquationSpec EquationSpec::lambda_sum(Rational lambda) {
  if (lambda.sign() <= 0) throw DomainError("lambda must be positive, got " + lambda.str());
  return EquationSpec(EquationKind::LambdaSum, std::move(lambda));
}

EquationSpec EquationSpec::lambda_diff(Rational lambda) {
  if (lambda.sign() <= 0) throw DomainError("lambda must be positive, got " + lambda.str());
  return EquationSpec(EquationKind::LambdaDiff, std::move(lambda));
}

std::string EquationSpec::name() const {
  switch (kind_) {
    case EquationKind::ApSum: return "a+b=2c";
    case EquationKind::ApDiff: return "a-b=2c";
    case EquationKind::PlainSum: return "a+b=c";
    case EquationKind::LambdaSum: return "a+b=(" + coeff_.str() + ")c";
    case EquationKind::LambdaDiff: return "a-b=(" + coeff_.str() + ")c";
  }
  return "?";
}

namespace {

constexpr std::int64_t kFastMagnitude = std::int64_t{1} << 40;
constexpr std::int64_t kBitmapSpan = std::int64_t{1} << 26;
constexpr std::int64_t kConvolutionSpan = std::int64_t{1} << 20;

std::optional<std::vector<std::int64_t>> small_integers(const NumSet& s) {
  std::vector<std::int64_t> out;
  out.reserve(s.size());
  for (const auto& x : s) {
    if (!x.is_integer() || !mpz_fits_slong_p(x.raw().get_num_mpz_t())) return std::nullopt;
    const long v = mpz_get_si(x.raw().get_num_mpz_t());
    if (v > kFastMagnitude || v < -kFastMagnitude) return std::nullopt;
    out.push_back(v);
  }
  return out;
}

/// Membership index over a sorted integer vector: a bitmap when the span is
/// small, hashing otherwise.
class IntMembership {
 public:
  explicit IntMembership(const std::vector<std::int64_t>& v) {
    if (v.empty()) return;
    lo_ = v.front();
    const std::int64_t span = v.back() - v.front() + 1;
    if (span <= kBitmapSpan) {
      bits_.assign(static_cast<std::size_t>(span), false);
      for (auto x : v) bits_[static_cast<std::size_t>(x - lo_)] = true;
      dense_ = true;
    } else {
      hash_.insert(v.begin(), v.end());
    }
  }
  bool contains(std::int64_t x) const {
    if (dense_) {
      const std::int64_t i = x - lo_;
      return i >= 0 && i < static_cast<std::int64_t>(bits_.size()) && bits_[static_cast<std::size_t>(i)];
    }
    return hash_.count(x) != 0;
  }

 private:
  bool dense_ = false;
  std::int64_t lo_ = 0;
  std::vector<bool> bits_;
  std::unordered_set<std::int64_t> hash_;
};

std::uint64_t count_integer_pairs(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                  const std::vector<std::int64_t>& c, bool difference, std::int64_t p,
                                  std::int64_t q) {
  // a +- b = (p/q) c  <=>  q (a +- b) = p c
  const IntMembership in_c(c);
  std::uint64_t total = 0;
  for (auto x : a) {
    for (auto y : b) {
      const std::int64_t v = q * (difference ? x - y : x + y);
      if (v % p != 0) continue;
      if (in_c.contains(v / p)) ++total;
    }
  }
  return total;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Histogram of a + b via a real FFT; entry k counts pairs with a + b = lo + k.
std::vector<std::uint64_t> sum_histogram(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                         std::int64_t& lo) {
  const std::int64_t span_a = a.back() - a.front();
  const std::int64_t span_b = b.back() - b.front();
  const std::size_t out_len = static_cast<std::size_t>(span_a + span_b + 1);
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  lo = a.front() + b.front();

  std::vector<double> fa(n, 0.0), fb(n, 0.0), out(n, 0.0);
  for (auto x : a) fa[static_cast<std::size_t>(x - a.front())] = 1.0;
  for (auto y : b) fb[static_cast<std::size_t>(y - b.front())] = 1.0;
  const std::size_t nc = n / 2 + 1;
  auto* ca = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nc));
  auto* cb = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nc));
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard lock(fftw_planner_mutex());
    const int ni = static_cast<int>(n);
    pa = fftw_plan_dft_r2c_1d(ni, fa.data(), ca, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(ni, fb.data(), cb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(ni, ca, out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < nc; ++i) {
    const double re = ca[i][0] * cb[i][0] - ca[i][1] * cb[i][1];
    const double im = ca[i][0] * cb[i][1] + ca[i][1] * cb[i][0];
    ca[i][0] = re;
    ca[i][1] = im;
  }
  fftw_execute(pinv);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
  }
  fftw_free(ca);
  fftw_free(cb);

  std::vector<std::uint64_t> hist(out_len);
  const double scale = static_cast<double>(n);
  for (std::size_t k = 0; k < out_len; ++k) hist[k] = static_cast<std::uint64_t>(std::llround(out[k] / scale));
  return hist;
}

std::uint64_t count_integer_convolution(const std::vector<std::int64_t>& a, std::vector<std::int64_t> b,
                                        const std::vector<std::int64_t>& c, bool difference, std::int64_t p,
                                        std::int64_t q) {
  if (difference) {
    for (auto& y : b) y = -y;
    std::reverse(b.begin(), b.end());
  }
  std::int64_t lo = 0;
  const auto hist = sum_histogram(a, b, lo);
  std::uint64_t total = 0;
  for (auto z : c) {
    const std::int64_t pc = p * z;
    if (pc % q != 0) continue;
    const std::int64_t k = pc / q - lo;
    if (k >= 0 && k < static_cast<std::int64_t>(hist.size())) total += hist[static_cast<std::size_t>(k)];
  }
  return total;
}

std::uint64_t count_rational_pairs(const NumSet& a, const NumSet& b, const NumSet& c, const EquationSpec& eq) {
  const std::unordered_set<Rational, RationalHash> in_c(c.begin(), c.end());
  const bool diff = eq.is_difference();
  const Rational& k = eq.coefficient();
  std::uint64_t total = 0;
  for (const auto& x : a) {
    for (const auto& y : b) {
      const Rational target = (diff ? x - y : x + y) / k;
      if (in_c.count(target) != 0) ++total;
    }
  }
  return total;
}

}  // namespace

std::uint64_t count_solutions(const NumSet& a, const NumSet& b, const NumSet& c, const EquationSpec& eq,
                              CountMethod method) {
  if (a.empty() || b.empty() || c.empty()) return 0;

  const auto& k = eq.coefficient();
  const bool small_coeff = mpz_cmp_si(k.raw().get_num_mpz_t(), 1 << 20) <= 0 &&
                           mpz_cmp_si(k.raw().get_den_mpz_t(), 1 << 20) <= 0;
  auto ia = small_integers(a);
  auto ib = small_integers(b);
  auto ic = small_integers(c);
  const bool integral = small_coeff && ia && ib && ic;

  if (method == CountMethod::Convolution && !integral)
    throw DomainError("convolution counting needs integer sets with magnitudes below 2^40");

  if (!integral) return count_rational_pairs(a, b, c, eq);

  const std::int64_t p = mpz_get_si(k.raw().get_num_mpz_t());
  const std::int64_t q = mpz_get_si(k.raw().get_den_mpz_t());
  const bool diff = eq.is_difference();

  bool use_conv = method == CountMethod::Convolution;
  if (method == CountMethod::Auto) {
    const std::int64_t spans = (ia->back() - ia->front()) + (ib->back() - ib->front());
    use_conv = spans <= kConvolutionSpan && a.size() * b.size() >= (std::size_t{1} << 22);
  }
  if (use_conv) {
    const std::int64_t spans = (ia->back() - ia->front()) + (ib->back() - ib->front());
    if (spans > kConvolutionSpan) throw DomainError("convolution counting needs a combined span of at most 2^20");
    return count_integer_convolution(*ia, *ib, *ic, diff, p, q);
  }
  return count_integer_pairs(*ia, *ib, *ic, diff, p, q);
}

bool CountReport::violated() const {
  return std::any_of(bounds.begin(), bounds.end(), [](const BoundCheck& b) { return b.slack.sign() < 0; });
}

const BoundCheck* CountReport::find(const std::string& name) const {
  for (const auto& b : bounds)
    if (b.name == name) return &b;
  return nullptr;
}

CountReport count_triples(const NumSet& a, const NumSet& b, const NumSet& c, const EquationSpec& eq,
                          CountMethod method) {
  CountReport r;
  r.count = count_solutions(a, b, c, eq, method);
  r.sizes = {a.size(), b.size(), c.size()};
  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());
  const auto nc = static_cast<std::int64_t>(c.size());
  const Rational count(static_cast<unsigned long>(r.count));
  auto attach = [&](std::string name, Rational value) {
    Rational slack = value - count;
    r.bounds.push_back({std::move(name), std::move(value), std::move(slack)});
  };

  switch (eq.kind()) {
    case EquationKind::ApSum:
      if (c == set_union(a, b)) attach("main", main_bound(na, nb));
      attach("size-majorant", size_majorant_bound(na, nb, nc));
      break;
    case EquationKind::ApDiff:
      if (b == a && c == a) {
        attach("principal", principal_bound(na));
        if (is_antisymmetric(a)) attach("antisymmetric", antisymmetric_bound(na));
      }
      attach("size-majorant", size_majorant_bound(na, nb, nc));
      break;
    case EquationKind::PlainSum:
      if (std::max(na, nb) <= nc && nc <= na + nb) attach("plain-sum", plain_sum_bound(na, nb, nc));
      attach("size-majorant", size_majorant_bound(na, nb, nc));
      break;
    case EquationKind::LambdaSum:
    case EquationKind::LambdaDiff:
      break;
  }
  return r;
}

CountReport count_diff(const NumSet& a) {
  CountReport r = count_triples(a, a, a, EquationSpec::ap_diff());
  if (is_antisymmetric(a)) {
    const NumSet neg = negate(a);
    const auto doubled = count_solutions(a, neg, set_union(a, neg), EquationSpec::ap_sum());
    if (doubled != 2 * r.count)
      throw std::logic_error("antisymmetric doubling identity failed: " + std::to_string(doubled) +
                             " != 2 * " + std::to_string(r.count));
  }
  return r;
}

std::string to_structured(const CountReport& r) {
  nlohmann::ordered_json j;
  j["count"] = r.count;
  j["sizes"] = r.sizes;
  auto bounds = nlohmann::ordered_json::array();
  for (const auto& b : r.bounds) {
    bounds.push_back({{"name", b.name},
                      {"value_num", b.value.num().get_str()},
                      {"value_den", b.value.den().get_str()},
                      {"slack_num", b.slack.num().get_str()},
                      {"slack_den", b.slack.den().get_str()}});
  }
  j["bounds"] = std::move(bounds);
  return j.dump(2) + "\n";
}

std::string to_table(const CountReport& r) {
  std::ostringstream out;
  out << "count  " << r.count << "\n";
  out << "sizes  |A|=" << r.sizes[0] << " |B|=" << r.sizes[1] << " |C|=" << r.sizes[2] << "\n";
  if (!r.bounds.empty()) {
    out << std::left << std::setw(16) << "bound" << std::setw(16) << "value" << "slack\n";
    for (const auto& b : r.bounds)
      out << std::setw(16) << b.name << std::setw(16) << b.value.str() << b.slack.str() << "\n";
  }
  return out.str();
}

Rational majorant(const Rational& x, const Rational& y, const Rational& z) {
  std::array<const Rational*, 3> v{&x, &y, &z};
  std::sort(v.begin(), v.end(), [](const Rational* l, const Rational* r) { return *l < *r; });
  const Rational& p = *v[0];
  const Rational& q = *v[1];
  const Rational& r = *v[2];
  Rational prod = p * q;
  const Rational excess = p + q - r;
  if (excess.sign() <= 0) return prod;
  return prod - excess * excess / 4;
}

namespace {

void require_nonnegative(std::int64_t n, const char* what) {
  if (n < 0) throw DomainError(std::string(what) + " must be non-negative");
}

}  // namespace

Rational main_bound(std::int64_t n_a, std::int64_t n_b) {
  require_nonnegative(n_a, "|A|");
  require_nonnegative(n_b, "|B|");
  const Rational n(n_a + n_b);
  return Rational(3, 20) * n * n + n / 2;
}

Rational antisymmetric_bound(std::int64_t n) {
  require_nonnegative(n, "|A|");
  const Rational m(n);
  return Rational(3, 10) * m * m + m / 2;
}

Rational principal_bound(std::int64_t n) {
  require_nonnegative(n, "|A|");
  const Rational m(n);
  return m * m / 2 + m / 2;
}

Rational plain_sum_bound(std::int64_t n_a, std::int64_t n_b, std::int64_t n_c) {
  require_nonnegative(n_a, "|A|");
  require_nonnegative(n_b, "|B|");
  if (std::max(n_a, n_b) > n_c)
    throw DomainError("plain-sum bound needs max(|A|,|B|) <= |C|, got max(" + std::to_string(n_a) + "," +
                      std::to_string(n_b) + ") > " + std::to_string(n_c));
  if (n_c > n_a + n_b)
    throw DomainError("plain-sum bound needs |C| <= |A|+|B|, got " + std::to_string(n_c) + " > " +
                      std::to_string(n_a + n_b));
  const Rational excess(n_a + n_b - n_c);
  return Rational(n_a) * Rational(n_b) - excess * excess / 4 + Rational(1, 4);
}

Rational size_majorant_bound(std::int64_t n_a, std::int64_t n_b, std::int64_t n_c) {
  require_nonnegative(n_a, "|A|");
  require_nonnegative(n_b, "|B|");
  require_nonnegative(n_c, "|C|");
  return majorant(Rational(n_a), Rational(n_b), Rational(n_c)) + Rational(1, 4);
}

namespace {

long residue(const Rational& x, long modulus) {
  if (!x.is_integer()) throw DomainError("residue classes need integer elements, got " + x.str());
  return static_cast<long>(mpz_fdiv_ui(x.raw().get_num_mpz_t(), static_cast<unsigned long>(modulus)));
}

}  // namespace

ParityProfile parity_profile(const NumSet& a) {
  ParityProfile p;
  for (const auto& x : a) {
    switch (residue(x, 4)) {
      case 0: ++p.m00; break;
      case 2: ++p.m01; break;
      case 1: ++p.m10; break;
      default: ++p.m11; break;
    }
  }
  p.m0 = p.m00 + p.m01;
  p.m1 = p.m10 + p.m11;
  return p;
}

NumSet residue_class(const NumSet& s, long modulus, long r) {
  std::vector<Rational> out;
  for (const auto& x : s)
    if (residue(x, modulus) == r) out.push_back(x);
  return NumSet(std::move(out));
}

bool decomposition_check(const NumSet& a, const NumSet& b) {
  const auto ap = EquationSpec::ap_sum();
  const NumSet a0 = residue_class(a, 2, 0), a1 = residue_class(a, 2, 1);
  const NumSet b0 = residue_class(b, 2, 0), b1 = residue_class(b, 2, 1);
  const NumSet all = set_union(a, b);
  const auto whole = count_solutions(a, b, all, ap);
  const auto parts = count_solutions(a0, b0, set_union(a0, b0), ap) +
                     count_solutions(a0, b0, set_union(a1, b1), ap) + count_solutions(a1, b1, all, ap);
  return whole == parts;
}

CaseBoundReport case_bound_checks(const NumSet& a) {
  CaseBoundReport rep;
  if (!a.all_integers()) throw DomainError("case bounds need an integer set");
  if (a.empty()) {
    rep.skipped = true;
    rep.note = "empty set";
    return rep;
  }
  mpz_class g = 0;
  for (const auto& x : a) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.raw().get_num_mpz_t());
  rep.divisor = g;
  if (g == 0) {
    rep.skipped = true;
    rep.note = "the set {0} has no odd element after normalization";
    return rep;
  }
  NumSet norm = affine_image(a, AffineMap(Rational(mpz_class(1), g), 0));
  ParityProfile prof = parity_profile(norm);
  if (prof.m00 > prof.m01) {
    // Negation preserves both even residue classes mod 4, so this can only
    // help if the classes were already ordered; it is tried for completeness.
    const NumSet neg = negate(norm);
    const ParityProfile np = parity_profile(neg);
    if (np.m00 <= np.m01) {
      norm = neg;
      prof = np;
      rep.negated = true;
    }
  }
  rep.profile = prof;
  if (prof.m00 > prof.m01) {
    rep.skipped = true;
    rep.note = "normalization m00 <= m01 is unattainable (m00=" + std::to_string(prof.m00) +
               ", m01=" + std::to_string(prof.m01) + ")";
    return rep;
  }
  if (prof.m0 == norm.size()) throw std::logic_error("gcd-normalized set has no odd element");

  rep.count = count_solutions(norm, norm, norm, EquationSpec::ap_diff());
  const Rational count(static_cast<unsigned long>(rep.count));
  const Rational m0(static_cast<unsigned long>(prof.m0)), m1(static_cast<unsigned long>(prof.m1));
  const Rational m00(static_cast<unsigned long>(prof.m00)), m01(static_cast<unsigned long>(prof.m01));
  const Rational m10(static_cast<unsigned long>(prof.m10)), m11(static_cast<unsigned long>(prof.m11));
  const Rational half(1, 2);

  if (prof.m0 >= prof.m1) {
    rep.even_majority.applies = true;
    rep.even_majority.bound = m1 * m1 + 2 * majorant(m00, m01, m1) + half + half * m0 * m0 + half * m0;
    rep.even_majority.slack = rep.even_majority.bound - count;
  }
  if (prof.m1 >= prof.m0) {
    rep.odd_majority.applies = true;
    rep.odd_majority.bound =
        m0 * m0 + majorant(m10, m10, m0) + majorant(m11, m11, m0) + half + 2 * m10 * m11;
    rep.odd_majority.slack = rep.odd_majority.bound - count;
  }
  return rep;
}

}  // namespace apx
