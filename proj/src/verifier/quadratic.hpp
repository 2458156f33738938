// Quadratic forms, range arithmetic, and region LPs shared by the double
// (guidance) and exact (verification) passes of the certifier.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "apx/rational.hpp"

namespace apx::detail {

constexpr int kMaxDim = 4;
template <class T>
using Vec = std::array<T, kMaxDim>;
template <class T>
using Mat = std::array<Vec<T>, kMaxDim>;

template <class T>
T from_rational(const Rational& r);
template <>
inline double from_rational<double>(const Rational& r) {
  return r.to_double();
}
template <>
inline Rational from_rational<Rational>(const Rational& r) {
  return r;
}

template <class T>
Vec<T> convert(const Vec<Rational>& v) {
  Vec<T> out{};
  for (int i = 0; i < kMaxDim; ++i) out[i] = from_rational<T>(v[i]);
  return out;
}

/// c + a.x
template <class T>
struct Linear {
  T c{};
  Vec<T> a{};

  static Linear constant(T v) { return Linear{v, {}}; }
  static Linear variable(int i) {
    Linear l{};
    l.a[i] = T(1);
    return l;
  }
  friend Linear operator+(Linear x, const Linear& y) {
    x.c += y.c;
    for (int i = 0; i < kMaxDim; ++i) x.a[i] += y.a[i];
    return x;
  }
  friend Linear operator-(Linear x, const Linear& y) {
    x.c -= y.c;
    for (int i = 0; i < kMaxDim; ++i) x.a[i] -= y.a[i];
    return x;
  }
};

/// c + b.x + x^T h x / 2, h symmetric.
template <class T>
struct Quadratic {
  T c{};
  Vec<T> b{};
  Mat<T> h{};

  T value(const Vec<T>& x, int dim) const {
    T v = c;
    for (int i = 0; i < dim; ++i) {
      T row = b[i];
      T quad{};
      for (int j = 0; j < dim; ++j) quad += h[i][j] * x[j];
      v += x[i] * (row + quad / T(2));
    }
    return v;
  }
  Vec<T> gradient(const Vec<T>& x, int dim) const {
    Vec<T> g{};
    for (int i = 0; i < dim; ++i) {
      g[i] = b[i];
      for (int j = 0; j < dim; ++j) g[i] += h[i][j] * x[j];
    }
    return g;
  }

  friend Quadratic operator+(Quadratic x, const Quadratic& y) {
    x.c += y.c;
    for (int i = 0; i < kMaxDim; ++i) {
      x.b[i] += y.b[i];
      for (int j = 0; j < kMaxDim; ++j) x.h[i][j] += y.h[i][j];
    }
    return x;
  }
  friend Quadratic operator*(const T& k, Quadratic x) {
    x.c *= k;
    for (int i = 0; i < kMaxDim; ++i) {
      x.b[i] *= k;
      for (int j = 0; j < kMaxDim; ++j) x.h[i][j] *= k;
    }
    return x;
  }
};

template <class T>
Quadratic<T> product(const Linear<T>& p, const Linear<T>& q) {
  Quadratic<T> r;
  r.c = p.c * q.c;
  for (int i = 0; i < kMaxDim; ++i) {
    r.b[i] = p.c * q.a[i] + q.c * p.a[i];
    for (int j = 0; j < kMaxDim; ++j) r.h[i][j] = p.a[i] * q.a[j] + p.a[j] * q.a[i];
  }
  return r;
}

template <class T>
Quadratic<T> convert(const Quadratic<Rational>& q) {
  Quadratic<T> r;
  r.c = from_rational<T>(q.c);
  r.b = convert<T>(q.b);
  for (int i = 0; i < kMaxDim; ++i) r.h[i] = convert<T>(q.h[i]);
  return r;
}

/// q(L w) for the linear substitution x = L w.
template <class T>
Quadratic<T> substitute(const Quadratic<T>& q, const Mat<T>& l, int dim) {
  Quadratic<T> r;
  r.c = q.c;
  for (int k = 0; k < dim; ++k) {
    for (int i = 0; i < dim; ++i) r.b[k] += l[i][k] * q.b[i];
    for (int m = 0; m < dim; ++m) {
      T s{};
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) s += l[i][k] * q.h[i][j] * l[j][m];
      r.h[k][m] = s;
    }
  }
  return r;
}

template <class T>
struct Range {
  T lo{}, hi{};

  friend Range operator+(const Range& a, const Range& b) { return {a.lo + b.lo, a.hi + b.hi}; }
  friend Range operator*(const Range& a, const Range& b) {
    const T p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
  }
  friend Range operator*(const T& k, const Range& a) {
    if (k < T(0)) return {k * a.hi, k * a.lo};
    return {k * a.lo, k * a.hi};
  }
};

/// Upper end of q(p + d) = q(p) + sum_i d_i (g_i + h_ii d_i / 2 + sum_{j>i} h_ij d_j)
/// over d in [lo - p, hi - p], evaluated by nested range arithmetic.
/// With `linear` false the gradient term is omitted.
template <class T>
T nested_upper(const Quadratic<T>& q, int dim, const Vec<T>& lo, const Vec<T>& hi, const Vec<T>& p,
               bool linear = true) {
  const Vec<T> g = q.gradient(p, dim);
  Range<T> total{};
  for (int i = 0; i < dim; ++i) {
    const Range<T> di{lo[i] - p[i], hi[i] - p[i]};
    Range<T> f{};
    if (linear) f = Range<T>{g[i], g[i]};
    f = f + (q.h[i][i] / T(2)) * di;
    for (int j = i + 1; j < dim; ++j) f = f + q.h[i][j] * Range<T>{lo[j] - p[j], hi[j] - p[j]};
    total = total + di * f;
  }
  return q.value(p, dim) + total.hi;
}

/// Feasible region inside a box: either a slab lo <= w.x <= hi with w > 0,
/// or (in two dimensions) an intersection of half-planes a.x <= b.
template <class T>
struct RegionData {
  int dim = 0;
  bool slab = false;
  Vec<T> w{};
  T lo{}, hi{};
  std::vector<std::pair<Vec<T>, T>> planes;
};

template <class T>
RegionData<T> convert(const RegionData<Rational>& r) {
  RegionData<T> out;
  out.dim = r.dim;
  out.slab = r.slab;
  out.w = convert<T>(r.w);
  out.lo = from_rational<T>(r.lo);
  out.hi = from_rational<T>(r.hi);
  for (const auto& [a, b] : r.planes) out.planes.emplace_back(convert<T>(a), from_rational<T>(b));
  return out;
}

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b, int dim) {
  T s{};
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

template <class T>
std::optional<T> slab_lp_max(const RegionData<T>& r, const Vec<T>& c, const Vec<T>& lo, const Vec<T>& hi) {
  const int n = r.dim;
  if (dot(r.w, lo, n) > r.hi || dot(r.w, hi, n) < r.lo) return std::nullopt;
  Vec<T> x{};
  for (int i = 0; i < n; ++i) x[i] = c[i] > T(0) ? hi[i] : lo[i];
  T sigma = dot(r.w, x, n);
  std::array<int, kMaxDim> order{0, 1, 2, 3};
  // ascending c_i / w_i
  std::sort(order.begin(), order.begin() + n,
            [&](int i, int j) { return c[i] * r.w[j] < c[j] * r.w[i] || (!(c[j] * r.w[i] < c[i] * r.w[j]) && i < j); });
  if (sigma > r.hi) {
    for (int k = 0; k < n && sigma > r.hi; ++k) {
      const int i = order[k];
      const T take = std::min((x[i] - lo[i]) * r.w[i], sigma - r.hi);
      x[i] -= take / r.w[i];
      sigma -= take;
    }
  } else if (sigma < r.lo) {
    for (int k = n - 1; k >= 0 && sigma < r.lo; --k) {
      const int i = order[k];
      const T take = std::min((hi[i] - x[i]) * r.w[i], r.lo - sigma);
      x[i] += take / r.w[i];
      sigma += take;
    }
  }
  return dot(c, x, n);
}

template <class T>
std::optional<T> polygon_lp_max(const RegionData<T>& r, const Vec<T>& c, const Vec<T>& lo, const Vec<T>& hi) {
  using P = std::array<T, 2>;
  std::vector<P> poly{{lo[0], lo[1]}, {hi[0], lo[1]}, {hi[0], hi[1]}, {lo[0], hi[1]}};
  std::vector<P> next;
  for (const auto& [a, b] : r.planes) {
    next.clear();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const P& p = poly[i];
      const P& q = poly[(i + 1) % n];
      const T fp = a[0] * p[0] + a[1] * p[1] - b;
      const T fq = a[0] * q[0] + a[1] * q[1] - b;
      if (!(fp > T(0))) next.push_back(p);
      if ((fp < T(0) && fq > T(0)) || (fp > T(0) && fq < T(0))) {
        const T t = fp / (fp - fq);
        next.push_back({p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t});
      }
    }
    poly.swap(next);
    if (poly.empty()) return std::nullopt;
  }
  T best = c[0] * poly[0][0] + c[1] * poly[0][1];
  for (const auto& p : poly) best = std::max(best, c[0] * p[0] + c[1] * p[1]);
  return best;
}

/// max c.x over box [lo, hi] intersected with the region; nullopt when empty.
template <class T>
std::optional<T> lp_max(const RegionData<T>& r, const Vec<T>& c, const Vec<T>& lo, const Vec<T>& hi) {
  return r.slab ? slab_lp_max(r, c, lo, hi) : polygon_lp_max(r, c, lo, hi);
}

/// Euclidean projection onto box intersected with a slab (double only).
inline Vec<double> project_slab(const RegionData<double>& r, const Vec<double>& y, const Vec<double>& lo,
                                const Vec<double>& hi) {
  const int n = r.dim;
  auto at = [&](double mu, Vec<double>& x) {
    double s = 0;
    for (int i = 0; i < n; ++i) {
      x[i] = std::clamp(y[i] - mu * r.w[i], lo[i], hi[i]);
      s += r.w[i] * x[i];
    }
    return s;
  };
  Vec<double> x{};
  const double s0 = at(0.0, x);
  if (s0 >= r.lo && s0 <= r.hi) return x;
  const double target = s0 > r.hi ? r.hi : r.lo;
  double a = 0, b = 0;
  for (int i = 0; i < n; ++i) {
    a = std::min(a, (y[i] - hi[i]) / r.w[i]);
    b = std::max(b, (y[i] - lo[i]) / r.w[i]);
  }
  for (int it = 0; it < 60; ++it) {
    const double m = (a + b) / 2;
    if (at(m, x) > target)
      a = m;
    else
      b = m;
  }
  at((a + b) / 2, x);
  return x;
}

/// Whether -h is positive semidefinite (all principal minors non-negative).
bool negative_semidefinite(const Mat<Rational>& h, int dim);

}  // namespace apx::detail
