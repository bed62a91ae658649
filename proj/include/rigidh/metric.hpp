#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rigidh/errors.hpp"
#include "rigidh/family.hpp"
#include "rigidh/funcspec.hpp"
#include "rigidh/jet.hpp"

namespace rigidh {

template <class T>
using Mat6 = std::array<std::array<T, kDim>, kDim>;
using Matrix6 = Mat6<double>;

struct ChartPoint {
  std::array<double, kDim> x{};

  friend bool operator==(const ChartPoint&, const ChartPoint&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
using Box = std::array<Interval, kDim>;

namespace detail {

template <class T>
T lift(double c) {
  if constexpr (std::is_same_v<T, Jet2>) return Jet2::constant(c);
  else return c;
}

/// Adds `coeff * dx^i dx^j` (1-based) of a quadratic form to the symmetric
/// matrix: the full coefficient on the diagonal, half of it on each
/// off-diagonal mirror.
template <class T>
void add_form(Mat6<T>& g, int i, int j, const T& coeff) {
  const auto a = static_cast<std::size_t>(i - 1);
  const auto b = static_cast<std::size_t>(j - 1);
  if (a == b) {
    g[a][a] += coeff;
  } else {
    const T half = coeff * 0.5;
    g[a][b] += half;
    g[b][a] += half;
  }
}

template <class T>
T sq(const T& x) {
  return x * x;
}

template <class T>
T cube(const T& x) {
  return x * x * x;
}

}  // namespace detail

/// Characteristic roots f_1..f_6 with multiplicity.
template <class T>
std::array<T, kDim> characteristic_roots(const FamilyConfig& c, const std::array<T, kDim>& x) {
  const double eps = c.eps;
  const double et = c.eps_tilde;
  switch (c.family) {
    case FamilyTag::T2211: {
      const T f2 = eps * x[1];
      const T f4 = et * x[3] + c.a;
      return {f2, f2, f4, f4, compose(c.f5, x[4]), compose(c.f6, x[5])};
    }
    case FamilyTag::T321: {
      const T f3 = eps * x[2];
      const T f5 = et * x[4] + c.a;
      return {f3, f3, f3, f5, f5, compose(c.f6, x[5])};
    }
    case FamilyTag::T33: {
      const T f3 = eps * x[2];
      const T f6 = et * x[5] + c.a;
      return {f3, f3, f3, f6, f6, f6};
    }
    case FamilyTag::T411: {
      const T f4 = eps * x[3];
      return {f4, f4, f4, f4, compose(c.f5, x[4]), compose(c.f6, x[5])};
    }
    case FamilyTag::T51: {
      const T f5 = eps * x[4];
      return {f5, f5, f5, f5, f5, compose(c.f6, x[5])};
    }
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown family");
}

/// Second-block A for [33]. Literal: eps~ x^4 + omega(x^6); alt: eps~ x^5 + omega(x^6).
template <class T>
T a_tilde_33(const FamilyConfig& c, const std::array<T, kDim>& x) {
  const T& lin = c.misprints == MisprintMode::Alt ? x[4] : x[3];
  return static_cast<double>(c.eps_tilde) * lin + compose(c.omega, x[5]);
}

/// Canonical metric of the family at coordinates `x`, generic over the
/// scalar so the same code yields plain values (double) or exact first and
/// second partials (Jet2). Divisions are guarded and throw DivisionNearZero.
template <class T>
Mat6<T> family_metric(const FamilyConfig& c, const std::array<T, kDim>& x) {
  using detail::add_form;
  using detail::cube;
  using detail::sq;

  Mat6<T> g{};
  for (auto& row : g) row.fill(detail::lift<T>(0.0));

  const double eps = c.eps;
  const double et = c.eps_tilde;
  const auto r = characteristic_roots(c, x);

  switch (c.family) {
    case FamilyTag::T2211: {
      const T& f2 = r[1];
      const T& f4 = r[3];
      const T& f5 = r[4];
      const T& f6 = r[5];
      const T A = eps * x[0] + compose(c.theta, x[1]);
      const T At = et * x[2] + compose(c.omega, x[3]);
      const T s1 = 2.0 * inv(f4 - f2) + inv(f5 - f2) + inv(f6 - f2);
      const T s2 = 2.0 * inv(f2 - f4) + inv(f5 - f4) + inv(f6 - f4);
      const T p2 = c.sign(2) * sq(f4 - f2) * (f5 - f2) * (f6 - f2);
      const T p4 = c.sign(4) * sq(f2 - f4) * (f5 - f4) * (f6 - f4);
      add_form(g, 1, 2, 2.0 * A * p2);
      add_form(g, 2, 2, -(A * A * s1 * p2));
      add_form(g, 3, 4, 2.0 * At * p4);
      add_form(g, 4, 4, -(At * At * s2 * p4));
      add_form(g, 5, 5, c.sign(5) * sq(f2 - f5) * sq(f4 - f5) * (f6 - f5));
      add_form(g, 6, 6, c.sign(6) * sq(f2 - f6) * sq(f4 - f6) * (f5 - f6));
      break;
    }
    case FamilyTag::T321: {
      const T& f3 = r[2];
      const T& f5 = r[4];
      const T& f6 = r[5];
      const T A = eps * x[1] + compose(c.theta, x[2]);
      const T At = et * x[3] + compose(c.omega, x[4]);
      const T s1 = inv(f6 - f3) + 2.0 * inv(f5 - f3);
      const T s2 = sq(inv(f6 - f3)) + 2.0 * sq(inv(f5 - f3));
      const T s3 = (s1 * s1 - s2) * 0.5;
      const T s4 = 3.0 * inv(f3 - f5) + inv(f6 - f5);
      const T ex1 = eps * x[0];
      const T p3 = c.sign(3) * sq(f5 - f3) * (f6 - f3);
      add_form(g, 2, 2, p3);
      add_form(g, 1, 3, 4.0 * A * p3);
      add_form(g, 2, 3, 2.0 * (ex1 - 2.0 * A * s1) * p3);
      add_form(g, 3, 3, (ex1 * ex1 - 4.0 * ex1 * A * s1 + 4.0 * A * A * s3) * p3);
      const T p5 = c.sign(5) * cube(f3 - f5) * (f6 - f5);
      add_form(g, 4, 5, 2.0 * At * p5);
      add_form(g, 5, 5, -(s4 * At * At * p5));
      if (c.misprints == MisprintMode::Literal)
        add_form(g, 6, 6, c.sign(6) * sq(f5 - f6) * cube(f5 - f6));
      else
        add_form(g, 6, 6, c.sign(6) * cube(f3 - f6) * sq(f5 - f6));
      break;
    }
    case FamilyTag::T33: {
      const T& f3 = r[2];
      const T& f6 = r[5];
      const T A = eps * x[1] + compose(c.theta, x[2]);
      const T At = a_tilde_33(c, x);
      const T s1 = 3.0 * inv(f6 - f3);
      const T s2 = 3.0 * sq(inv(f6 - f3));
      const T ex1 = eps * x[0];
      const T ex4 = et * x[3];
      const T p3 = c.sign(3) * cube(f6 - f3);
      add_form(g, 2, 2, p3);
      add_form(g, 1, 3, 4.0 * A * p3);
      add_form(g, 2, 3, 2.0 * (ex1 - 2.0 * A * s1) * p3);
      add_form(g, 3, 3, (ex1 * ex1 - 4.0 * ex1 * A * s1 + 4.0 * A * A * s2) * p3);
      const T p6 = c.sign(6) * cube(f3 - f6);
      add_form(g, 5, 5, p6);
      add_form(g, 4, 6, 4.0 * At * p6);
      add_form(g, 5, 6, 2.0 * (ex4 + 2.0 * At * s1) * p6);
      add_form(g, 6, 6, (ex4 * ex4 + 4.0 * ex4 * At * s1 + 4.0 * At * At * s2) * p6);
      break;
    }
    case FamilyTag::T411: {
      const T& f4 = r[3];
      const T& f5 = r[4];
      const T& f6 = r[5];
      const T A = eps * x[2] + compose(c.theta, x[3]);
      const T s1 = inv(f5 - f4) + inv(f6 - f4);
      const T ex1 = eps * x[0];
      const T ex2 = eps * x[1];
      const T p = c.sign(4) * (f5 - f4) * (f6 - f4);
      add_form(g, 1, 4, 6.0 * A * p);
      add_form(g, 2, 3, 2.0 * p);
      add_form(g, 2, 4, 2.0 * (2.0 * ex2 - 3.0 * A * s1) * p);
      add_form(g, 3, 3, -(s1 * p));
      add_form(g, 3, 4, 2.0 * (ex1 - 2.0 * ex2 * s1) * p);
      add_form(g, 4, 4, 4.0 * (ex2 * ex2 * s1 + ex1 * ex2 - 1.5 * ex1 * A * s1) * p);
      // Printed outside the braced block, without the root prefactor.
      add_form(g, 3, 4, 3.0 * A);
      add_form(g, 4, 4, 12.0 * ex2 * A);
      add_form(g, 5, 5, c.sign(5) * sq(sq(f4 - f5)) * (f6 - f5));
      add_form(g, 6, 6, c.sign(6) * sq(sq(f4 - f6)) * (f5 - f6));
      break;
    }
    case FamilyTag::T51: {
      const T& f5 = r[4];
      const T& f6 = r[5];
      const T A = eps * x[3] + compose(c.theta, x[4]);
      const T s1 = inv(f6 - f5);
      const T ex1 = eps * x[0];
      const T ex2 = eps * x[1];
      const T ex3 = eps * x[2];
      const T p = c.sign(5) * (f6 - f5);
      add_form(g, 1, 5, 8.0 * A * p);
      add_form(g, 2, 4, 2.0 * p);
      add_form(g, 2, 5, 2.0 * (3.0 * ex3 - 4.0 * A * s1) * p);
      add_form(g, 3, 3, p);
      add_form(g, 3, 4, -2.0 * s1 * p);
      add_form(g, 3, 5, 2.0 * (2.0 * ex2 - 3.0 * ex3 * s1) * p);
      add_form(g, 4, 5, 2.0 * (ex1 - 2.0 * ex2 * s1) * p);
      add_form(g, 5, 5, 4.0 * (1.5 * ex1 * ex3 + ex2 * ex2 - 2.0 * ex1 * A * s1 - 3.0 * ex2 * ex3 * s1) * p);
      add_form(g, 6, 6, c.sign(6) * sq(f5 - f6) * cube(f5 - f6));
      break;
    }
  }
  return g;
}

/// Metric with all first and second partials, plus the root values.
struct MetricJet {
  Mat6<Jet2> g{};
  std::array<double, kDim> roots{};

  Matrix6 values() const {
    Matrix6 v{};
    for (std::size_t i = 0; i < kDim; ++i)
      for (std::size_t j = 0; j < kDim; ++j) v[i][j] = g[i][j].val;
    return v;
  }
};

inline std::array<Jet2, kDim> seed_point(const ChartPoint& p) {
  std::array<Jet2, kDim> x;
  for (std::size_t k = 0; k < kDim; ++k) x[k] = Jet2::variable(k, p.x[k]);
  return x;
}

inline void check_point(const ChartPoint& p) {
  for (double v : p.x)
    if (!std::isfinite(v)) throw Error(ErrorKind::PreconditionViolation, "chart point has non-finite coordinate");
}

/// Plain metric values (no derivatives).
inline Matrix6 metric_values(const FamilyConfig& c, const ChartPoint& p) {
  check_point(p);
  try {
    return family_metric<double>(c, p.x);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DivisionNearZero) throw Error(ErrorKind::SingularPoint, e.what());
    throw;
  }
}

inline MetricJet eval_metric(const FamilyConfig& c, const ChartPoint& p) {
  c.validate();
  check_point(p);
  MetricJet m;
  try {
    m.g = family_metric<Jet2>(c, seed_point(p));
    m.roots = characteristic_roots<double>(c, p.x);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DivisionNearZero) throw Error(ErrorKind::SingularPoint, e.what());
    throw;
  }
  return m;
}

inline double max_abs(const Matrix6& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double v : row) s = std::max(s, std::abs(v));
  return s;
}

/// Jet-valued inverse by Gauss-Jordan elimination with partial pivoting on
/// the value slots; the result satisfies g * g^{-1} = I through second order.
inline MetricJet metric_inverse(const MetricJet& m) {
  const Matrix6 vals = m.values();
  const double scale = max_abs(vals);
  if (scale == 0.0) throw Error(ErrorKind::NearSingularMetric, "zero metric");

  Mat6<Jet2> a = m.g;
  Mat6<Jet2> b{};
  for (std::size_t i = 0; i < kDim; ++i) b[i][i] = Jet2::constant(1.0);

  double det = 1.0;
  for (std::size_t col = 0; col < kDim; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < kDim; ++r)
      if (std::abs(a[r][col].val) > std::abs(a[piv][col].val)) piv = r;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      std::swap(b[piv], b[col]);
      det = -det;
    }
    det *= a[col][col].val;
    if (a[col][col].val == 0.0) throw Error(ErrorKind::NearSingularMetric, "zero pivot");
    const Jet2 rinv = inv(a[col][col], 0.0);
    for (std::size_t k = 0; k < kDim; ++k) {
      a[col][k] = a[col][k] * rinv;
      b[col][k] = b[col][k] * rinv;
    }
    for (std::size_t r = 0; r < kDim; ++r) {
      if (r == col || (a[r][col].val == 0.0 && a[r][col].is_constant())) continue;
      const Jet2 f = a[r][col];
      for (std::size_t k = 0; k < kDim; ++k) {
        a[r][k] -= f * a[col][k];
        b[r][k] -= f * b[col][k];
      }
    }
  }
  // Row-scaled bound: |det| <= prod_i max_j |g_ij| up to a dimension
  // factor, so this ratio is insensitive to the very different magnitudes
  // of the blocks.
  double row_scale = 1.0;
  for (const auto& row : vals) {
    double r = 0.0;
    for (double v : row) r = std::max(r, std::abs(v));
    row_scale *= r;
  }
  if (!(std::abs(det) > 1e-10 * row_scale))
    throw Error(ErrorKind::NearSingularMetric, "metric determinant below threshold");

  // Symmetrize: the exact inverse of a symmetric matrix is symmetric.
  MetricJet out;
  out.roots = m.roots;
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i; j < kDim; ++j) {
      Jet2 s = b[i][j] + b[j][i];
      s *= 0.5;
      out.g[i][j] = s;
      out.g[j][i] = s;
    }
  }
  return out;
}

struct Signature {
  int n_plus = 0;
  int n_minus = 0;
  std::array<double, kDim> eigenvalues{};  // sorted descending

  friend bool operator==(const Signature& l, const Signature& r) {
    return l.n_plus == r.n_plus && l.n_minus == r.n_minus;
  }
};

inline Signature signature(const Matrix6& g) {
  Eigen::Matrix<double, 6, 6> m;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g[i][j];
  const double scale = max_abs(g);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(m, Eigen::EigenvaluesOnly);
  Signature s;
  for (std::size_t k = 0; k < kDim; ++k) {
    const double lam = es.eigenvalues()(static_cast<Eigen::Index>(kDim - 1 - k));
    if (!(std::abs(lam) > 1e-10 * scale)) throw Error(ErrorKind::NearSingularMetric, "zero eigenvalue");
    s.eigenvalues[k] = lam;
    (lam > 0 ? s.n_plus : s.n_minus) += 1;
  }
  return s;
}

inline Signature signature(const MetricJet& m) { return signature(m.values()); }

/// Cheap lower-bound proxy for the distance to the singular locus: the
/// smallest of |A|, |A~|, the gaps between distinct root groups, and the
/// diagonal factors of the simple-root coordinates.
inline double singular_distance(const FamilyConfig& c, const ChartPoint& p) {
  const auto& x = p.x;
  const auto r = characteristic_roots<double>(c, x);
  const double eps = c.eps;
  const double et = c.eps_tilde;
  std::vector<double> crit;
  std::vector<double> groups;
  std::vector<std::size_t> simple;  // 0-based simple-root coordinates
  switch (c.family) {
    case FamilyTag::T2211:
      crit = {eps * x[0] + c.theta(x[1]), et * x[2] + c.omega(x[3])};
      groups = {r[1], r[3], r[4], r[5]};
      simple = {4, 5};
      break;
    case FamilyTag::T321:
      crit = {eps * x[1] + c.theta(x[2]), et * x[3] + c.omega(x[4])};
      groups = {r[2], r[4], r[5]};
      simple = {5};
      break;
    case FamilyTag::T33:
      crit = {eps * x[1] + c.theta(x[2]), a_tilde_33(c, x)};
      groups = {r[2], r[5]};
      break;
    case FamilyTag::T411:
      crit = {eps * x[2] + c.theta(x[3])};
      groups = {r[3], r[4], r[5]};
      simple = {4, 5};
      break;
    case FamilyTag::T51:
      crit = {eps * x[3] + c.theta(x[4])};
      groups = {r[4], r[5]};
      simple = {5};
      break;
  }
  double d = std::numeric_limits<double>::infinity();
  for (double v : crit) d = std::min(d, std::abs(v));
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t j = i + 1; j < groups.size(); ++j) d = std::min(d, std::abs(groups[i] - groups[j]));
  for (std::size_t s : simple) {
    double prod = 1.0;
    for (std::size_t i = 0; i < kDim; ++i)
      if (i != s) prod *= r[i] - r[s];
    d = std::min(d, std::abs(prod));
  }
  return d;
}

inline Box uniform_box(double lo, double hi) {
  Box b;
  b.fill({lo, hi});
  return b;
}

/// [0.1, 0.9] on every coordinate, with the coordinate that carries the
/// second linear root group shifted to [1.1, 1.9] so the two groups cannot
/// meet when both eps flags are set.
inline Box default_box(FamilyTag tag) {
  Box b = uniform_box(0.1, 0.9);
  switch (tag) {
    case FamilyTag::T2211: b[3] = {1.1, 1.9}; break;
    case FamilyTag::T321: b[4] = {1.1, 1.9}; break;
    case FamilyTag::T33: b[5] = {1.1, 1.9}; break;
    case FamilyTag::T411:
    case FamilyTag::T51: break;
  }
  return b;
}

inline constexpr double kMinSingularDistance = 0.05;

/// Seeded uniform rejection sampling inside `box`.
inline std::vector<ChartPoint> sample_points(const FamilyConfig& c, int n, std::uint64_t seed, const Box& box,
                                             double min_distance = kMinSingularDistance) {
  if (n < 1) throw Error(ErrorKind::PreconditionViolation, "sample count must be >= 1");
  for (const auto& iv : box)
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw Error(ErrorKind::PreconditionViolation, "invalid sampling box");
  std::mt19937_64 rng(seed);
  std::vector<ChartPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  const std::uint64_t max_rejections = 10000ULL * static_cast<std::uint64_t>(n);
  std::uint64_t rejections = 0;
  while (out.size() < static_cast<std::size_t>(n)) {
    ChartPoint p;
    for (std::size_t k = 0; k < kDim; ++k) {
      std::uniform_real_distribution<double> dist(box[k].lo, box[k].hi);
      p.x[k] = dist(rng);
    }
    if (singular_distance(c, p) >= min_distance) {
      out.push_back(p);
    } else if (++rejections > max_rejections) {
      throw Error(ErrorKind::SamplingExhausted, "too many rejected samples; check the sampling box");
    }
  }
  return out;
}

}  // namespace rigidh
