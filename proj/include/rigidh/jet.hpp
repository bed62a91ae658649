#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "rigidh/errors.hpp"

namespace rigidh {

inline constexpr std::size_t kDim = 6;
inline constexpr double kDivisionGuard = 1e-12;

/// Second-order truncated Taylor value over the six chart coordinates.
///
/// `grad[k]` holds the first partial along x^(k+1) and `hess[i][j]` the
/// mixed second partial. The Hessian is kept exactly symmetric: every
/// operation fills the upper triangle and mirrors it.
struct Jet2 {
  double val = 0.0;
  std::array<double, kDim> grad{};
  std::array<std::array<double, kDim>, kDim> hess{};

  static Jet2 constant(double c) {
    Jet2 j;
    j.val = c;
    return j;
  }

  /// Seeds coordinate `k` (0-based) at value `at`.
  static Jet2 variable(std::size_t k, double at) {
    Jet2 j;
    j.val = at;
    j.grad[k] = 1.0;
    return j;
  }

  Jet2& operator+=(const Jet2& o) {
    val += o.val;
    for (std::size_t i = 0; i < kDim; ++i) {
      grad[i] += o.grad[i];
      for (std::size_t j = 0; j < kDim; ++j) hess[i][j] += o.hess[i][j];
    }
    return *this;
  }

  Jet2& operator-=(const Jet2& o) {
    val -= o.val;
    for (std::size_t i = 0; i < kDim; ++i) {
      grad[i] -= o.grad[i];
      for (std::size_t j = 0; j < kDim; ++j) hess[i][j] -= o.hess[i][j];
    }
    return *this;
  }

  Jet2& operator*=(double s) {
    val *= s;
    for (std::size_t i = 0; i < kDim; ++i) {
      grad[i] *= s;
      for (std::size_t j = 0; j < kDim; ++j) hess[i][j] *= s;
    }
    return *this;
  }

  Jet2& operator+=(double s) {
    val += s;
    return *this;
  }

  bool is_constant() const {
    for (std::size_t i = 0; i < kDim; ++i) {
      if (grad[i] != 0.0) return false;
      for (std::size_t j = 0; j < kDim; ++j)
        if (hess[i][j] != 0.0) return false;
    }
    return true;
  }
};

/// Applies a scalar function with known value and first two derivatives
/// (f0, f1, f2) at `a.val`. Shared by inversion and polynomial composition.
inline Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
  Jet2 r;
  r.val = f0;
  for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = f1 * a.grad[i];
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i; j < kDim; ++j) {
      const double h = f1 * a.hess[i][j] + f2 * a.grad[i] * a.grad[j];
      r.hess[i][j] = h;
      r.hess[j][i] = h;
    }
  }
  return r;
}

inline Jet2 operator-(Jet2 a) {
  a *= -1.0;
  return a;
}

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator+(Jet2 a, double s) { return a += s; }
inline Jet2 operator+(double s, Jet2 a) { return a += s; }
inline Jet2 operator-(Jet2 a, double s) { return a += -s; }
inline Jet2 operator-(double s, const Jet2& a) { return -a + s; }
inline Jet2 operator*(Jet2 a, double s) { return a *= s; }
inline Jet2 operator*(double s, Jet2 a) { return a *= s; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.val = a.val * b.val;
  for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = a.val * b.grad[i] + b.val * a.grad[i];
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i; j < kDim; ++j) {
      const double h = a.val * b.hess[i][j] + b.val * a.hess[i][j] + a.grad[i] * b.grad[j] +
                       b.grad[i] * a.grad[j];
      r.hess[i][j] = h;
      r.hess[j][i] = h;
    }
  }
  return r;
}

/// 1/a through second order. Throws DivisionNearZero below `guard`.
inline Jet2 inv(const Jet2& a, double guard = kDivisionGuard) {
  if (!(std::abs(a.val) >= guard)) throw Error(ErrorKind::DivisionNearZero, "jet inverse of near-zero value");
  const double r = 1.0 / a.val;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}

inline double inv(double a, double guard = kDivisionGuard) {
  if (!(std::abs(a) >= guard)) throw Error(ErrorKind::DivisionNearZero, "inverse of near-zero value");
  return 1.0 / a;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inv(b); }
inline Jet2 operator/(double s, const Jet2& b) { return inv(b) * s; }
inline Jet2 operator/(const Jet2& a, double s) { return a * inv(s); }

/// Integer power by repeated multiplication; keeps exactness for small n.
template <class T>
T ipow(const T& x, int n) {
  if (n == 0) return T(1.0);
  T r = x;
  for (int i = 1; i < n; ++i) r = r * x;
  return r;
}

template <>
inline Jet2 ipow(const Jet2& x, int n) {
  if (n == 0) return Jet2::constant(1.0);
  Jet2 r = x;
  for (int i = 1; i < n; ++i) r = r * x;
  return r;
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.val; }

}  // namespace rigidh
