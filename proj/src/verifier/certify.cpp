#include "apx/certify.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>

#include "apx/analytic.hpp"
#include "quadratic.hpp"

namespace apx {

using detail::kMaxDim;
using detail::Linear;
using detail::Mat;
using detail::Quadratic;
using detail::RegionData;
using detail::Vec;

namespace detail {

bool negative_semidefinite(const Mat<Rational>& h, int dim) {
  for (int mask = 1; mask < (1 << dim); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < dim; ++i)
      if (mask >> i & 1) idx.push_back(i);
    const int n = static_cast<int>(idx.size());
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m[i][j] = -h[idx[i]][idx[j]];
    Rational det = 1;
    for (int c = 0; c < n && !det.is_zero(); ++c) {
      int piv = c;
      while (piv < n && m[piv][c].is_zero()) ++piv;
      if (piv == n) {
        det = 0;
        break;
      }
      if (piv != c) {
        std::swap(m[piv], m[c]);
        det = -det;
      }
      det *= m[c][c];
      for (int r = c + 1; r < n; ++r) {
        const Rational f = m[r][c] / m[c][c];
        for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      }
    }
    if (det.sign() < 0) return false;
  }
  return true;
}

}  // namespace detail

namespace {

constexpr unsigned kBoundBits = 48;
constexpr unsigned kTangentBits = 40;
constexpr std::size_t kMaxSurvivors = 32;
constexpr int kMaxExactAttempts = 4;

// ---------------------------------------------------------------------------
// Target definitions

struct PieceDef {
  std::string name;
  Quadratic<Rational> q;
  std::vector<int> conds;
  bool concave = false;
};

struct FrameDef {
  Vec<Rational> a{};
  int eliminated = 0;
};

struct TargetDef {
  CertTarget id{};
  int dim = 0;
  std::vector<std::string> labels;
  Vec<Rational> root_lo{}, root_hi{};
  RegionData<Rational> region;
  std::string region_text;
  std::vector<Linear<Rational>> conds;  // c + a.x <= 0 required over the leaf
  std::vector<PieceDef> pieces;
  std::vector<FrameDef> frames;
  bool centered = false;
  std::vector<Vec<Rational>> seeds;
  std::function<Rational(const Vec<Rational>&)> eval;
};

using Lin = Linear<Rational>;
using Quad = Quadratic<Rational>;

// Upper bounds for G(a, b, c) valid for non-negative arguments: the symmetric
// form (equal to G where the triangle inequalities hold) and the three
// pairwise products.
std::vector<std::pair<Quad, std::vector<int>>> majorant_pieces(TargetDef& t, const Lin& a, const Lin& b,
                                                               const Lin& c) {
  std::vector<std::pair<Quad, std::vector<int>>> out;
  const Quad cross = detail::product(a, b) + detail::product(b, c) + detail::product(c, a);
  const Quad squares = detail::product(a, a) + detail::product(b, b) + detail::product(c, c);
  const Quad sym = Rational(1, 4) * (Rational(2) * cross + Rational(-1) * squares);
  const int first = static_cast<int>(t.conds.size());
  t.conds.push_back(a - b - c);
  t.conds.push_back(b - a - c);
  t.conds.push_back(c - a - b);
  out.push_back({sym, {first, first + 1, first + 2}});
  out.push_back({detail::product(a, b), {}});
  out.push_back({detail::product(a, c), {}});
  out.push_back({detail::product(b, c), {}});
  return out;
}

void add_f_pieces(TargetDef& t, const Lin& x0, const Lin& x1, const Lin& y0, const Lin& y1) {
  const Lin s = x0 + x1 + y0 + y1;
  const Lin rest = Lin::constant(1) - s;
  const Quad by_square = Rational(3, 20) * detail::product(s, s);
  const Quad by_product = detail::product(x0, y0) + detail::product(x1, y1);
  const Quad tail = Rational(1, 4) * detail::product(rest, rest);
  const auto g1 = majorant_pieces(t, x0, y1, rest);
  const auto g2 = majorant_pieces(t, x1, y0, rest);
  const char* g_names[] = {"sym", "ab", "ac", "bc"};
  for (int m = 0; m < 2; ++m) {
    for (std::size_t i = 0; i < g1.size(); ++i) {
      for (std::size_t j = 0; j < g2.size(); ++j) {
        PieceDef p;
        p.name = std::string(m == 0 ? "square" : "product") + "/" + g_names[i] + "/" + g_names[j];
        p.q = (m == 0 ? by_square : by_product) + g1[i].first + g2[j].first + tail;
        p.conds = g1[i].second;
        p.conds.insert(p.conds.end(), g2[j].second.begin(), g2[j].second.end());
        t.pieces.push_back(std::move(p));
      }
    }
  }
}

Quad quadratic2(const Rational& xx, const Rational& xy, const Rational& yy, const Rational& x, const Rational& y) {
  Quad q;
  q.b[0] = x;
  q.b[1] = y;
  q.h[0][0] = 2 * xx;
  q.h[1][1] = 2 * yy;
  q.h[0][1] = q.h[1][0] = xy;
  return q;
}

Vec<Rational> vec2(Rational a, Rational b) { return {std::move(a), std::move(b), Rational(0), Rational(0)}; }

void set_polygon_root(TargetDef& t) {
  // Bounding box of the polygon, rounded outward to 2^-8.
  const Vec<Rational> lo = vec2(-1, -1), hi = vec2(2, 2);
  for (int i = 0; i < 2; ++i) {
    Vec<Rational> c{};
    c[i] = 1;
    const auto up = detail::lp_max(t.region, c, lo, hi);
    c[i] = -1;
    const auto down = detail::lp_max(t.region, c, lo, hi);
    if (!up || !down) throw std::logic_error("empty certification region");
    t.root_hi[i] = round_up(*up, 8);
    t.root_lo[i] = round_down(-*down, 8);
  }
}

TargetDef make_target(CertTarget id) {
  TargetDef t;
  t.id = id;
  switch (id) {
    case CertTarget::LemmaInequality: {
      t.dim = 4;
      t.labels = {"x0", "x1", "y0", "y1"};
      for (int i = 0; i < 4; ++i) {
        t.root_lo[i] = 0;
        t.root_hi[i] = 1;
      }
      t.region.dim = 4;
      t.region.slab = true;
      t.region.w = {1, 1, 1, 1};
      t.region.lo = Rational(1, 2);
      t.region.hi = 1;
      t.region_text = "x0,x1,y0,y1 >= 0, 1/2 <= x0+x1+y0+y1 <= 1";
      add_f_pieces(t, Lin::variable(0), Lin::variable(1), Lin::variable(2), Lin::variable(3));
      t.frames.push_back({{1, 1, 1, 1}, 3});
      t.seeds = {{Rational(1, 5), Rational(1, 5), Rational(1, 5), Rational(1, 5)},
                 {Rational(1, 2), 0, Rational(1, 2), 0}};
      t.eval = [](const Vec<Rational>& p) { return eval_f(Point4{p[0], p[1], p[2], p[3]}); };
      break;
    }
    case CertTarget::Claim1: {
      t.dim = 2;
      t.labels = {"x0", "x1"};
      t.root_lo = vec2(0, 0);
      t.root_hi = vec2(Rational(1, 2), Rational(1, 2));
      t.region.dim = 2;
      t.region.slab = true;
      t.region.w = vec2(1, 1);
      t.region.lo = Rational(1, 4);
      t.region.hi = Rational(1, 2);
      t.region_text = "x0,x1 >= 0, 1/4 <= x0+x1 <= 1/2";
      add_f_pieces(t, Lin::variable(0), Lin::variable(1), Lin::variable(1), Lin::variable(0));
      t.frames.push_back({vec2(1, 1), 1});
      t.seeds = {vec2(Rational(1, 5), Rational(1, 5))};
      t.eval = [](const Vec<Rational>& p) { return eval_claim1(p[0], p[1]); };
      break;
    }
    case CertTarget::Claim2U:
    case CertTarget::Claim2V: {
      const bool is_u = id == CertTarget::Claim2U;
      const auto [phi_lo, phi_hi] = golden_bracket(1'000'000);
      t.dim = 2;
      t.labels = {"x0", "x1"};
      t.region.dim = 2;
      t.region.planes = {{vec2(-1, 0), 0}, {vec2(0, -1), 0}, {vec2(1, 1), Rational(1, 2)}, {vec2(-3, -1), -1}};
      if (is_u) {
        t.region.planes.push_back({vec2(phi_lo, -1), 0});
        t.region_text = "x0,x1 >= 0, x0+x1 <= 1/2, 3x0+x1 >= 1, x1 >= " + phi_lo.str() + " x0";
        t.pieces.push_back({"u", quadratic2(2, -2, -2, -1, 1), {}, false});
        t.seeds = {vec2(1 / (3 + phi_lo), phi_lo / (3 + phi_lo)), vec2(Rational(1, 4), Rational(1, 4))};
        t.eval = [](const Vec<Rational>& p) { return eval_u(p[0], p[1]); };
      } else {
        t.region.planes.push_back({vec2(-phi_hi, 1), 0});
        t.region_text = "x0,x1 >= 0, x0+x1 <= 1/2, 3x0+x1 >= 1, x1 <= " + phi_hi.str() + " x0";
        t.pieces.push_back(
            {"v", quadratic2(Rational(8, 5), Rational(-4, 5), Rational(-12, 5), -1, 1), {}, false});
        t.seeds = {vec2(Rational(1, 2), 0), vec2(Rational(2, 5), Rational(1, 10))};
        t.eval = [](const Vec<Rational>& p) { return eval_v(p[0], p[1]); };
      }
      set_polygon_root(t);
      t.frames.push_back({vec2(1, 1), 1});
      t.centered = true;
      break;
    }
  }
  for (auto& p : t.pieces) p.concave = detail::negative_semidefinite(p.q.h, t.dim);
  return t;
}

// x = L w with w = (a.x, x_i for i != eliminated).
template <class T>
Mat<T> frame_matrix(const FrameDef& f, int dim) {
  Mat<T> l{};
  const T ak = detail::from_rational<T>(f.a[f.eliminated]);
  int col = 1;
  l[f.eliminated][0] = T(1) / ak;
  for (int i = 0; i < dim; ++i) {
    if (i == f.eliminated) continue;
    l[i][col] = T(1);
    l[f.eliminated][col] = -detail::from_rational<T>(f.a[i]) / ak;
    ++col;
  }
  return l;
}

// ---------------------------------------------------------------------------
// Per-number-type compiled data

template <class T>
struct Compiled {
  int dim = 0;
  RegionData<T> region;
  std::vector<Linear<T>> conds;
  std::vector<Quadratic<T>> pieces;
  std::vector<Vec<T>> frame_a;
  std::vector<int> frame_elim;
  std::vector<std::vector<Quadratic<T>>> lifted;  // [frame][piece]

  explicit Compiled(const TargetDef& t) : dim(t.dim), region(detail::convert<T>(t.region)) {
    for (const auto& c : t.conds) conds.push_back({detail::from_rational<T>(c.c), detail::convert<T>(c.a)});
    for (const auto& p : t.pieces) pieces.push_back(detail::convert<T>(p.q));
    for (const auto& f : t.frames) {
      frame_a.push_back(detail::convert<T>(f.a));
      frame_elim.push_back(f.eliminated);
      const Mat<T> l = frame_matrix<T>(f, dim);
      std::vector<Quadratic<T>> row;
      for (const auto& q : pieces) row.push_back(detail::substitute(q, l, dim));
      lifted.push_back(std::move(row));
    }
  }

  std::optional<T> lp(const Vec<T>& c, const Vec<T>& lo, const Vec<T>& hi) const {
    return detail::lp_max(region, c, lo, hi);
  }

  bool feasible(const Vec<T>& lo, const Vec<T>& hi) const { return lp(Vec<T>{}, lo, hi).has_value(); }

  bool condition_holds(int c, const Vec<T>& lo, const Vec<T>& hi) const {
    const auto m = lp(conds[c].a, lo, hi);
    return !m || !(*m + conds[c].c > T(0));
  }

  /// Frame box for the x-box; nullopt when the region misses the box.
  std::optional<std::pair<Vec<T>, Vec<T>>> frame_box(int f, const Vec<T>& lo, const Vec<T>& hi) const {
    const Vec<T>& a = frame_a[f];
    Vec<T> neg{};
    for (int i = 0; i < dim; ++i) neg[i] = -a[i];
    const auto up = lp(a, lo, hi);
    const auto down = lp(neg, lo, hi);
    if (!up || !down) return std::nullopt;
    Vec<T> wlo{}, whi{};
    wlo[0] = -*down;
    whi[0] = *up;
    int col = 1;
    for (int i = 0; i < dim; ++i) {
      if (i == frame_elim[f]) continue;
      wlo[col] = lo[i];
      whi[col] = hi[i];
      ++col;
    }
    return std::make_pair(wlo, whi);
  }

  /// Upper bound of the piece over box ∩ region for the given form and base.
  std::optional<T> bound(int piece, FormKind form, int frame, const Vec<T>& base, const Vec<T>& lo,
                         const Vec<T>& hi) const {
    const Quadratic<T>& q = pieces[piece];
    switch (form) {
      case FormKind::Frame: {
        const auto wb = frame_box(frame, lo, hi);
        if (!wb) return std::nullopt;
        return detail::nested_upper(lifted[frame][piece], dim, wb->first, wb->second, base);
      }
      case FormKind::Centered:
      case FormKind::Tangent: {
        const Vec<T> g = q.gradient(base, dim);
        const auto m = lp(g, lo, hi);
        if (!m) return std::nullopt;
        const T shift = *m - detail::dot(g, base, dim);
        if (form == FormKind::Tangent) return q.value(base, dim) + shift;
        return detail::nested_upper(q, dim, lo, hi, base, false) + shift;
      }
      case FormKind::Outside:
        break;
    }
    return std::nullopt;
  }

  /// Expansion point used by the frame form: a.x at its upper end (mode 0) or
  /// midpoint (mode 1), other coordinates at box centres.
  std::optional<Vec<T>> frame_base(int frame, int mode, const Vec<T>& lo, const Vec<T>& hi) const {
    const auto wb = frame_box(frame, lo, hi);
    if (!wb) return std::nullopt;
    Vec<T> p{};
    for (int i = 0; i < dim; ++i) p[i] = (wb->first[i] + wb->second[i]) / T(2);
    if (mode == 0) p[0] = wb->second[0];
    return p;
  }
};

struct Node {
  Vec<Rational> lo{}, hi{};
  Vec<double> dlo{}, dhi{};
  unsigned depth = 0;
};

Node make_node(const Vec<Rational>& lo, const Vec<Rational>& hi, int dim, unsigned depth) {
  Node n;
  n.lo = lo;
  n.hi = hi;
  for (int i = 0; i < dim; ++i) {
    n.dlo[i] = lo[i].to_double();
    n.dhi[i] = hi[i].to_double();
  }
  n.depth = depth;
  return n;
}

std::pair<Node, Node> split(const Node& n, int dim) {
  int k = 0;
  Rational widest = n.hi[0] - n.lo[0];
  for (int i = 1; i < dim; ++i) {
    Rational w = n.hi[i] - n.lo[i];
    if (w > widest) {
      widest = std::move(w);
      k = i;
    }
  }
  const Rational mid = (n.lo[k] + n.hi[k]) / 2;
  Vec<Rational> left_hi = n.hi, right_lo = n.lo;
  left_hi[k] = mid;
  right_lo[k] = mid;
  return {make_node(n.lo, left_hi, dim, n.depth + 1), make_node(right_lo, n.hi, dim, n.depth + 1)};
}

struct Candidate {
  double bound;
  int piece;
  FormKind form;
  int frame;
  int mode;
  Vec<double> point;  // tangent point
};

Vec<double> round_point(const Vec<double>& p, int dim) {
  Vec<double> r{};
  for (int i = 0; i < dim; ++i) r[i] = std::ldexp(std::round(std::ldexp(p[i], kTangentBits)), -static_cast<int>(kTangentBits));
  return r;
}

Vec<Rational> exact_point(const Vec<double>& p, int dim) {
  Vec<Rational> r{};
  for (int i = 0; i < dim; ++i) r[i] = Rational::from_double(p[i]);
  return r;
}

class Engine {
 public:
  Engine(const TargetDef& def, const Rational& threshold, const Rational& tol)
      : def_(def), exact_(def), approx_(def), limit_(threshold + tol), limit_d_(limit_.to_double()) {}

  const TargetDef& def() const { return def_; }
  const Compiled<Rational>& exact() const { return exact_; }
  const Rational& limit() const { return limit_; }

  /// Leaf record when the node closes, nullopt when it must be split.
  std::optional<LeafRecord> decide(const Node& n) const {
    const int dim = def_.dim;
    if (!approx_.feasible(n.dlo, n.dhi) && !exact_.feasible(n.lo, n.hi)) return outside_leaf(n);

    std::vector<char> cond_ok(approx_.conds.size());
    for (std::size_t c = 0; c < cond_ok.size(); ++c) cond_ok[c] = approx_.condition_holds(static_cast<int>(c), n.dlo, n.dhi);

    std::vector<Candidate> cands;
    const int frames = static_cast<int>(def_.frames.size());
    for (int piece = 0; piece < static_cast<int>(def_.pieces.size()); ++piece) {
      const PieceDef& pd = def_.pieces[piece];
      if (!std::all_of(pd.conds.begin(), pd.conds.end(), [&](int c) { return cond_ok[c] != 0; })) continue;
      for (int f = 0; f < frames; ++f) {
        for (int mode = 0; mode < 2; ++mode) {
          const auto base = approx_.frame_base(f, mode, n.dlo, n.dhi);
          if (!base) continue;
          const auto b = approx_.bound(piece, FormKind::Frame, f, *base, n.dlo, n.dhi);
          if (b) cands.push_back({*b, piece, FormKind::Frame, f, mode, {}});
        }
      }
      if (def_.centered) {
        Vec<double> c{};
        for (int i = 0; i < dim; ++i) c[i] = (n.dlo[i] + n.dhi[i]) / 2;
        const auto b = approx_.bound(piece, FormKind::Centered, -1, c, n.dlo, n.dhi);
        if (b) cands.push_back({*b, piece, FormKind::Centered, -1, 0, {}});
      }
      if (pd.concave && def_.region.slab) {
        const Vec<double> p = round_point(ascent_point(piece, n), dim);
        const auto b = approx_.bound(piece, FormKind::Tangent, -1, p, n.dlo, n.dhi);
        if (b) cands.push_back({*b, piece, FormKind::Tangent, -1, 0, p});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.bound < b.bound; });
    int attempts = 0;
    for (const auto& c : cands) {
      if (c.bound > limit_d_ || attempts >= kMaxExactAttempts) break;
      ++attempts;
      if (auto leaf = verify(n, c)) return leaf;
    }
    return std::nullopt;
  }

 private:
  LeafRecord outside_leaf(const Node& n) const {
    LeafRecord r;
    r.lo.assign(n.lo.begin(), n.lo.begin() + def_.dim);
    r.hi.assign(n.hi.begin(), n.hi.begin() + def_.dim);
    r.form = FormKind::Outside;
    return r;
  }

  std::optional<LeafRecord> verify(const Node& n, const Candidate& c) const {
    const int dim = def_.dim;
    for (int cond : def_.pieces[c.piece].conds)
      if (!exact_.condition_holds(cond, n.lo, n.hi)) return std::nullopt;
    Vec<Rational> base{};
    switch (c.form) {
      case FormKind::Frame: {
        auto b = exact_.frame_base(c.frame, c.mode, n.lo, n.hi);
        if (!b) return std::nullopt;
        base = std::move(*b);
        break;
      }
      case FormKind::Centered:
        for (int i = 0; i < dim; ++i) base[i] = (n.lo[i] + n.hi[i]) / 2;
        break;
      case FormKind::Tangent:
        base = exact_point(c.point, dim);
        break;
      case FormKind::Outside:
        return std::nullopt;
    }
    const auto b = exact_.bound(c.piece, c.form, c.frame, base, n.lo, n.hi);
    if (!b) return std::nullopt;
    Rational recorded = round_up(*b, kBoundBits);
    if (recorded > limit_) return std::nullopt;
    LeafRecord r = outside_leaf(n);
    r.form = c.form;
    r.piece = c.piece;
    r.frame = c.frame;
    r.base.assign(base.begin(), base.begin() + dim);
    r.bound = std::move(recorded);
    return r;
  }

  /// Approximate maximizer of a concave piece over box ∩ slab.
  Vec<double> ascent_point(int piece, const Node& n) const {
    const int dim = def_.dim;
    const Quadratic<double>& q = approx_.pieces[piece];
    double lip = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) lip = std::max(lip, std::fabs(q.h[i][j]));
    lip *= dim;
    Vec<double> p{};
    for (int i = 0; i < dim; ++i) p[i] = (n.dlo[i] + n.dhi[i]) / 2;
    p = detail::project_slab(approx_.region, p, n.dlo, n.dhi);
    if (lip == 0) return p;
    for (int it = 0; it < 60; ++it) {
      const Vec<double> g = q.gradient(p, dim);
      for (int i = 0; i < dim; ++i) p[i] += g[i] / lip;
      p = detail::project_slab(approx_.region, p, n.dlo, n.dhi);
    }
    return p;
  }

  const TargetDef& def_;
  Compiled<Rational> exact_;
  Compiled<double> approx_;
  Rational limit_;
  double limit_d_;
};

// ---------------------------------------------------------------------------
// Subdivision

struct Subtree {
  std::string bits;  // '1' split, '0' leaf, 'U' deferred unit, 'S' unresolved
  std::vector<LeafRecord> leaves;
  std::vector<Node> units;
  std::vector<Node> surviving;
  unsigned max_depth = 0;
  std::uint64_t unresolved = 0;
};

struct Control {
  std::uint64_t budget;
  unsigned max_depth;
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> exhausted{false};
};

void expand(const Engine& eng, const Node& root, std::optional<unsigned> unit_depth, Control& ctl, Subtree& out) {
  std::vector<Node> stack{root};
  while (!stack.empty()) {
    if (ctl.exhausted.load(std::memory_order_relaxed)) return;
    Node n = std::move(stack.back());
    stack.pop_back();
    if (unit_depth && n.depth == *unit_depth) {
      out.bits.push_back('U');
      out.units.push_back(std::move(n));
      continue;
    }
    if (ctl.nodes.fetch_add(1, std::memory_order_relaxed) + 1 > ctl.budget) {
      ctl.exhausted = true;
      return;
    }
    out.max_depth = std::max(out.max_depth, n.depth);
    if (auto leaf = eng.decide(n)) {
      out.bits.push_back('0');
      out.leaves.push_back(std::move(*leaf));
      continue;
    }
    if (n.depth >= ctl.max_depth) {
      out.bits.push_back('S');
      if (out.surviving.size() < kMaxSurvivors) out.surviving.push_back(n);
      ++out.unresolved;
      continue;
    }
    out.bits.push_back('1');
    auto [left, right] = split(n, eng.def().dim);
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));
  }
}

Box to_box(const Node& n, const TargetDef& def) {
  Box b;
  b.labels = def.labels;
  for (int i = 0; i < def.dim; ++i) b.dims.emplace_back(n.lo[i], n.hi[i]);
  return b;
}

bool in_domain(const TargetDef& def, const Vec<Rational>& p) {
  for (int i = 0; i < def.dim; ++i)
    if (p[i] < def.root_lo[i] || p[i] > def.root_hi[i]) return false;
  if (def.region.slab) {
    const Rational s = detail::dot(def.region.w, p, def.dim);
    return def.region.lo <= s && s <= def.region.hi;
  }
  for (const auto& [a, b] : def.region.planes)
    if (detail::dot(a, p, def.dim) > b) return false;
  return true;
}

std::vector<Witness> find_witnesses(const TargetDef& def, const std::vector<LeafRecord>& leaves,
                                    const Rational& near) {
  std::vector<Witness> out;
  std::optional<Rational> best;
  for (const auto& s : def.seeds) {
    if (!in_domain(def, s)) continue;
    Witness w{std::vector<Rational>(s.begin(), s.begin() + def.dim), def.eval(s), "seed"};
    if (!best || w.value > *best) best = w.value;
    out.push_back(std::move(w));
  }
  std::optional<Witness> leaf_best;
  for (const auto& l : leaves) {
    if (l.form == FormKind::Outside || l.bound <= near) continue;
    Vec<Rational> c{};
    for (int i = 0; i < def.dim; ++i) c[i] = (l.lo[i] + l.hi[i]) / 2;
    if (!in_domain(def, c)) continue;
    Rational v = def.eval(c);
    if (!leaf_best || v > leaf_best->value)
      leaf_best = Witness{std::vector<Rational>(c.begin(), c.begin() + def.dim), std::move(v), "leaf"};
  }
  if (leaf_best && (!best || leaf_best->value > *best)) out.push_back(std::move(*leaf_best));
  return out;
}

}  // namespace

std::optional<CertTarget> parse_cert_target(std::string_view name) {
  if (name == "lemma-inequality") return CertTarget::LemmaInequality;
  if (name == "claim1") return CertTarget::Claim1;
  if (name == "claim2-u") return CertTarget::Claim2U;
  if (name == "claim2-v") return CertTarget::Claim2V;
  return std::nullopt;
}

std::string target_name(CertTarget t) {
  switch (t) {
    case CertTarget::LemmaInequality: return "lemma-inequality";
    case CertTarget::Claim1: return "claim1";
    case CertTarget::Claim2U: return "claim2-u";
    case CertTarget::Claim2V: return "claim2-v";
  }
  return "?";
}

Rational default_threshold(CertTarget t) {
  if (t == CertTarget::Claim2U || t == CertTarget::Claim2V) return Rational(-1, 10);
  return Rational(3, 20);
}

std::pair<Rational, Rational> golden_bracket(std::uint64_t max_den) {
  // Stern-Brocot descent towards the root of x^2 - 3x + 1 in (0, 1).
  auto above = [](const Rational& x) { return x * x - 3 * x + 1 < 0; };
  mpz_class lp = 0, lq = 1, hp = 1, hq = 1;
  const mpz_class cap(static_cast<unsigned long>(max_den));
  for (;;) {
    const mpz_class mp = lp + hp, mq = lq + hq;
    if (mq > cap) break;
    const Rational m(mp, mq);
    if (above(m)) {
      hp = mp;
      hq = mq;
    } else {
      lp = mp;
      lq = mq;
    }
  }
  Rational lo(lp, lq), hi(hp, hq);
  if (above(lo) || !above(hi)) throw std::logic_error("golden bracket lost the root");
  return {lo, hi};
}

std::optional<Witness> CertifyResult::best_witness() const {
  const auto& w = certificate.witnesses;
  if (w.empty()) return std::nullopt;
  const Witness* best = &w.front();
  for (const auto& x : w)
    if (x.value > best->value) best = &x;
  return *best;
}

CertifyResult certify_sup(CertTarget target, const CertifyOptions& options) {
  if (options.tol.sign() <= 0) throw DomainError("tolerance must be positive");
  const TargetDef def = make_target(target);
  const Rational threshold = options.threshold.value_or(default_threshold(target));
  const Engine eng(def, threshold, options.tol);
  Control ctl{options.budget, options.max_depth};

  const Node root = make_node(def.root_lo, def.root_hi, def.dim, 0);
  Subtree top;
  expand(eng, root, options.unit_depth, ctl, top);

  std::vector<Subtree> units(top.units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < units.size(); i = next.fetch_add(1))
      expand(eng, top.units[i], std::nullopt, ctl, units[i]);
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(units.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CertifyResult res;
  res.nodes = ctl.nodes.load();
  Certificate& cert = res.certificate;
  cert.target = target;
  cert.threshold = threshold;
  cert.tol = options.tol;
  cert.labels = def.labels;
  cert.root_lo.assign(def.root_lo.begin(), def.root_lo.begin() + def.dim);
  cert.root_hi.assign(def.root_hi.begin(), def.root_hi.begin() + def.dim);
  cert.region = def.region_text;

  // Splice unit subtrees into the top-level preorder.
  std::size_t top_leaf = 0, unit = 0;
  std::vector<Node> surviving = top.surviving;
  std::uint64_t unresolved = top.unresolved;
  unsigned max_depth = top.max_depth;
  for (char b : top.bits) {
    if (b == '1') {
      cert.tree.push_back('1');
    } else if (b == '0') {
      cert.tree.push_back('0');
      cert.leaves.push_back(std::move(top.leaves[top_leaf++]));
    } else if (b == 'S') {
      continue;
    } else {
      Subtree& s = units[unit++];
      cert.tree += s.bits;
      for (auto& l : s.leaves) cert.leaves.push_back(std::move(l));
      surviving.insert(surviving.end(), s.surviving.begin(), s.surviving.end());
      unresolved += s.unresolved;
      max_depth = std::max(max_depth, s.max_depth);
    }
  }
  for (const auto& n : surviving) {
    if (res.surviving.size() >= kMaxSurvivors) break;
    res.surviving.push_back(to_box(n, def));
  }

  if (ctl.exhausted) {
    res.status = CertStatus::BudgetExhausted;
    return res;
  }
  if (unresolved != 0) {
    res.status = CertStatus::Unresolved;
    return res;
  }

  CertStats& st = cert.stats;
  st.nodes = res.nodes;
  st.leaves = cert.leaves.size();
  st.max_depth = max_depth;
  const Rational near = threshold - options.tol;
  bool have_max = false;
  for (const auto& l : cert.leaves) {
    switch (l.form) {
      case FormKind::Outside: ++st.outside; continue;
      case FormKind::Frame: ++st.frame_leaves; break;
      case FormKind::Centered: ++st.centered_leaves; break;
      case FormKind::Tangent: ++st.tangent_leaves; break;
    }
    if (l.bound > near) ++st.near_maximal;
    if (!have_max || l.bound > cert.max_bound) {
      cert.max_bound = l.bound;
      have_max = true;
    }
  }
  cert.witnesses = find_witnesses(def, cert.leaves, near);
  res.status = CertStatus::Certified;
  return res;
}

ReplayReport replay_certificate(const Certificate& c) {
  ReplayReport rep;
  auto fail = [&](std::string msg) {
    rep.ok = false;
    rep.message = std::move(msg);
    return rep;
  };
  const TargetDef def = make_target(c.target);
  const int dim = def.dim;
  if (c.tol.sign() <= 0) return fail("tolerance must be positive");
  if (static_cast<int>(c.root_lo.size()) != dim || static_cast<int>(c.root_hi.size()) != dim)
    return fail("root box has the wrong dimension");
  for (int i = 0; i < dim; ++i)
    if (c.root_lo[i] != def.root_lo[i] || c.root_hi[i] != def.root_hi[i])
      return fail("root box differs from the target's domain box");

  // The domain must lie inside the root box.
  if (def.region.slab) {
    for (int i = 0; i < dim; ++i)
      if (def.root_lo[i].sign() != 0 || def.root_hi[i] * def.region.w[i] < def.region.hi)
        return fail("root box does not contain the domain");
  } else {
    const Vec<Rational> lo = vec2(-1, -1), hi = vec2(2, 2);
    for (int i = 0; i < dim; ++i) {
      Vec<Rational> e{};
      e[i] = 1;
      const auto up = detail::lp_max(def.region, e, lo, hi);
      e[i] = -1;
      const auto down = detail::lp_max(def.region, e, lo, hi);
      if (!up || !down || *up > def.root_hi[i] || -*down < def.root_lo[i])
        return fail("root box does not contain the domain");
    }
  }

  const Compiled<Rational> exact(def);
  const Rational limit = c.threshold + c.tol;
  std::size_t bit = 0, leaf = 0;
  std::vector<Node> stack{make_node(def.root_lo, def.root_hi, dim, 0)};
  bool have_max = false;
  while (!stack.empty()) {
    Node n = std::move(stack.back());
    stack.pop_back();
    if (bit >= c.tree.size()) return fail("tree encoding ends early");
    const char b = c.tree[bit++];
    if (b == '1') {
      auto [l, r] = split(n, dim);
      stack.push_back(std::move(r));
      stack.push_back(std::move(l));
      continue;
    }
    if (b != '0') return fail("invalid tree symbol");
    if (leaf >= c.leaves.size()) return fail("fewer leaf records than tree leaves");
    const LeafRecord& rec = c.leaves[leaf++];
    const std::string where = "leaf " + std::to_string(leaf - 1) + ": ";
    if (static_cast<int>(rec.lo.size()) != dim || static_cast<int>(rec.hi.size()) != dim)
      return fail(where + "box has the wrong dimension");
    for (int i = 0; i < dim; ++i)
      if (rec.lo[i] != n.lo[i] || rec.hi[i] != n.hi[i]) return fail(where + "box does not match the subdivision");
    if (rec.form == FormKind::Outside) {
      if (exact.feasible(n.lo, n.hi)) return fail(where + "marked outside but meets the domain");
      continue;
    }
    if (rec.piece < 0 || rec.piece >= static_cast<int>(def.pieces.size())) return fail(where + "unknown piece");
    const PieceDef& pd = def.pieces[rec.piece];
    if (rec.form == FormKind::Frame && (rec.frame < 0 || rec.frame >= static_cast<int>(def.frames.size())))
      return fail(where + "unknown frame");
    if (rec.form == FormKind::Tangent && !pd.concave) return fail(where + "tangent form on a non-concave piece");
    if (static_cast<int>(rec.base.size()) != dim) return fail(where + "base point has the wrong dimension");
    for (int cond : pd.conds)
      if (!exact.condition_holds(cond, n.lo, n.hi)) return fail(where + "piece " + pd.name + " is not valid here");
    Vec<Rational> base{};
    std::copy(rec.base.begin(), rec.base.end(), base.begin());
    const auto value = exact.bound(rec.piece, rec.form, rec.frame, base, n.lo, n.hi);
    if (!value) return fail(where + "bound could not be evaluated");
    if (*value > rec.bound) return fail(where + "recomputed bound " + value->str() + " exceeds recorded " + rec.bound.str());
    if (rec.bound > limit) return fail(where + "recorded bound exceeds threshold + tol");
    if (!have_max || rec.bound > rep.max_bound) {
      rep.max_bound = rec.bound;
      have_max = true;
    }
    ++rep.leaves_checked;
  }
  if (bit != c.tree.size()) return fail("trailing tree symbols");
  if (leaf != c.leaves.size()) return fail("more leaf records than tree leaves");
  rep.ok = true;
  rep.message = "all " + std::to_string(c.leaves.size()) + " leaves verified";
  return rep;
}

}  // namespace apx
