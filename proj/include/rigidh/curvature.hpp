#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "rigidh/errors.hpp"
#include "rigidh/metric.hpp"

namespace rigidh {

template <class T>
using Tensor3 = std::array<std::array<std::array<T, kDim>, kDim>, kDim>;
template <class T>
using Tensor4 = std::array<Tensor3<T>, kDim>;
using Tensor3d = Tensor3<double>;
using Tensor4d = Tensor4<double>;

/// Levi-Civita connection with its first partials.
struct Christoffel {
  Tensor3d gamma{};   // gamma[i][j][k] = Gamma^i_{jk}
  Tensor4d dgamma{};  // dgamma[i][j][k][m] = d_m Gamma^i_{jk}
  Matrix6 g{};        // metric values at the point
};

/// Gamma^i_{jk} = 1/2 g^{il} (d_j g_{lk} + d_k g_{lj} - d_l g_{jk}); the
/// derivative slots come from the metric Hessians and the inverse-metric
/// gradients.
inline Christoffel christoffel(const MetricJet& m, const MetricJet& minv) {
  Tensor3d first{};   // Gamma_{ljk}
  Tensor4d dfirst{};  // d_m Gamma_{ljk}
  for (std::size_t l = 0; l < kDim; ++l) {
    for (std::size_t j = 0; j < kDim; ++j) {
      for (std::size_t k = j; k < kDim; ++k) {
        const double v = 0.5 * (m.g[l][k].grad[j] + m.g[l][j].grad[k] - m.g[j][k].grad[l]);
        first[l][j][k] = first[l][k][j] = v;
        for (std::size_t q = 0; q < kDim; ++q) {
          const double d = 0.5 * (m.g[l][k].hess[j][q] + m.g[l][j].hess[k][q] - m.g[j][k].hess[l][q]);
          dfirst[l][j][k][q] = dfirst[l][k][j][q] = d;
        }
      }
    }
  }

  Christoffel c;
  c.g = m.values();
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = 0; j < kDim; ++j) {
      for (std::size_t k = j; k < kDim; ++k) {
        double v = 0.0;
        std::array<double, kDim> d{};
        for (std::size_t l = 0; l < kDim; ++l) {
          const Jet2& gi = minv.g[i][l];
          v += gi.val * first[l][j][k];
          for (std::size_t q = 0; q < kDim; ++q) d[q] += gi.grad[q] * first[l][j][k] + gi.val * dfirst[l][j][k][q];
        }
        c.gamma[i][j][k] = c.gamma[i][k][j] = v;
        c.dgamma[i][j][k] = c.dgamma[i][k][j] = d;
      }
    }
  }
  return c;
}

struct RiemannTensor {
  Tensor4d r{};  // r[i][j][k][l] = R^i_{jkl}
  Matrix6 g{};

  /// R_{ijkl} = g_{im} R^m_{jkl}
  Tensor4d lowered() const {
    Tensor4d low{};
    for (std::size_t i = 0; i < kDim; ++i)
      for (std::size_t j = 0; j < kDim; ++j)
        for (std::size_t k = 0; k < kDim; ++k)
          for (std::size_t l = 0; l < kDim; ++l) {
            double s = 0.0;
            for (std::size_t m = 0; m < kDim; ++m) s += g[i][m] * r[m][j][k][l];
            low[i][j][k][l] = s;
          }
    return low;
  }

  double max_abs() const {
    double s = 0.0;
    for (const auto& a : r)
      for (const auto& b : a)
        for (const auto& c : b)
          for (double v : c) s = std::max(s, std::abs(v));
    return s;
  }
};

/// R^i_{jkl} = d_k Gamma^i_{jl} - d_l Gamma^i_{jk}
///           + Gamma^i_{km} Gamma^m_{jl} - Gamma^i_{lm} Gamma^m_{jk}.
/// With this convention the unit sphere has K = +1.
inline RiemannTensor riemann(const Christoffel& c) {
  RiemannTensor rt;
  rt.g = c.g;
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = 0; j < kDim; ++j) {
      for (std::size_t k = 0; k < kDim; ++k) {
        for (std::size_t l = k + 1; l < kDim; ++l) {
          double v = c.dgamma[i][j][l][k] - c.dgamma[i][j][k][l];
          for (std::size_t m = 0; m < kDim; ++m) v += c.gamma[i][k][m] * c.gamma[m][j][l] - c.gamma[i][l][m] * c.gamma[m][j][k];
          rt.r[i][j][k][l] = v;
          rt.r[i][j][l][k] = -v;
        }
      }
    }
  }
  return rt;
}

/// S^i_{jkl} = delta^i_k g_{jl} - delta^i_l g_{jk}: the curvature tensor of
/// a constant-curvature space with K = 1.
inline Tensor4d constant_curvature_model(const Matrix6& g) {
  Tensor4d s{};
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j)
      for (std::size_t k = 0; k < kDim; ++k)
        for (std::size_t l = 0; l < kDim; ++l)
          s[i][j][k][l] = (i == k ? g[j][l] : 0.0) - (i == l ? g[j][k] : 0.0);
  return s;
}

inline double frobenius(const Tensor4d& t) {
  double s = 0.0;
  for (const auto& a : t)
    for (const auto& b : a)
      for (const auto& c : b)
        for (double v : c) s += v * v;
  return std::sqrt(s);
}

struct KFit {
  double K = 0.0;
  double residual_rel = 0.0;
  int n_terms = 0;
  double norm_R = 0.0;
  double norm_S = 0.0;
};

/// Global least-squares fit of R = K S over all components.
inline KFit fit_constant_curvature(const RiemannTensor& rt) {
  const Tensor4d s = constant_curvature_model(rt.g);
  double rs = 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j)
      for (std::size_t k = 0; k < kDim; ++k)
        for (std::size_t l = 0; l < kDim; ++l) {
          rs += rt.r[i][j][k][l] * s[i][j][k][l];
          ss += s[i][j][k][l] * s[i][j][k][l];
        }
  if (ss == 0.0) throw Error(ErrorKind::DegenerateFit, "model tensor vanishes");

  KFit fit;
  fit.K = rs / ss;
  fit.n_terms = static_cast<int>(kDim * kDim * kDim * kDim);
  fit.norm_R = frobenius(rt.r);
  fit.norm_S = std::sqrt(ss);
  double res = 0.0;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j)
      for (std::size_t k = 0; k < kDim; ++k)
        for (std::size_t l = 0; l < kDim; ++l) {
          const double d = rt.r[i][j][k][l] - fit.K * s[i][j][k][l];
          res += d * d;
        }
  fit.residual_rel = std::sqrt(res) / std::max({1.0, fit.norm_R, std::abs(fit.K) * fit.norm_S});
  return fit;
}

struct SymmetryResiduals {
  double antisym1 = 0.0;  // R_{ijkl} + R_{jikl}
  double antisym2 = 0.0;  // R_{ijkl} + R_{ijlk}
  double pairsym = 0.0;   // R_{ijkl} - R_{klij}
  double bianchi1 = 0.0;  // R^i_{jkl} + R^i_{klj} + R^i_{ljk}

  double max() const { return std::max({antisym1, antisym2, pairsym, bianchi1}); }
};

/// Max-norm residuals of the classical algebraic identities, relative to
/// max(1, max|g|, max|R_{ijkl}|).
inline SymmetryResiduals symmetry_residuals(const RiemannTensor& rt) {
  const Tensor4d low = rt.lowered();
  double scale = std::max(1.0, max_abs(rt.g));
  for (const auto& a : low)
    for (const auto& b : a)
      for (const auto& c : b)
        for (double v : c) scale = std::max(scale, std::abs(v));

  SymmetryResiduals s;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j)
      for (std::size_t k = 0; k < kDim; ++k)
        for (std::size_t l = 0; l < kDim; ++l) {
          s.antisym1 = std::max(s.antisym1, std::abs(low[i][j][k][l] + low[j][i][k][l]));
          s.antisym2 = std::max(s.antisym2, std::abs(low[i][j][k][l] + low[i][j][l][k]));
          s.pairsym = std::max(s.pairsym, std::abs(low[i][j][k][l] - low[k][l][i][j]));
          s.bianchi1 = std::max(s.bianchi1, std::abs(rt.r[i][j][k][l] + rt.r[i][k][l][j] + rt.r[i][l][j][k]));
        }
  s.antisym1 /= scale;
  s.antisym2 /= scale;
  s.pairsym /= scale;
  s.bianchi1 /= scale;
  return s;
}

/// How the comma in h_{ij,k} is read.
enum class CommaMode { Covariant, Partial };

/// max_{ijk} |h_{ij,k} - 2 g_ij phi_k - g_ik phi_j - g_jk phi_i|.
inline double eisenhart_residual(const MetricJet& m, const Christoffel& c, const Mat6<Jet2>& h,
                                 const std::array<double, kDim>& phi_grad, CommaMode mode = CommaMode::Covariant) {
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = i + 1; j < kDim; ++j)
      if (h[i][j].val != h[j][i].val || h[i][j].grad != h[j][i].grad)
        throw Error(ErrorKind::PreconditionViolation, "h must be symmetric");
  for (double v : phi_grad)
    if (!std::isfinite(v)) throw Error(ErrorKind::PreconditionViolation, "phi gradient must be finite");

  double worst = 0.0;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j)
      for (std::size_t k = 0; k < kDim; ++k) {
        double dh = h[i][j].grad[k];
        if (mode == CommaMode::Covariant) {
          for (std::size_t l = 0; l < kDim; ++l)
            dh -= c.gamma[l][k][i] * h[l][j].val + c.gamma[l][k][j] * h[i][l].val;
        }
        const double rhs = 2.0 * m.g[i][j].val * phi_grad[k] + m.g[i][k].val * phi_grad[j] + m.g[j][k].val * phi_grad[i];
        worst = std::max(worst, std::abs(dh - rhs));
      }
  return worst;
}

/// Everything the brute-force pipeline produces at one point.
struct PointCurvature {
  MetricJet metric;
  MetricJet inverse;
  Christoffel connection;
  RiemannTensor curvature;
};

inline PointCurvature compute_curvature(const FamilyConfig& cfg, const ChartPoint& p) {
  PointCurvature pc;
  pc.metric = eval_metric(cfg, p);
  pc.inverse = metric_inverse(pc.metric);
  pc.connection = christoffel(pc.metric, pc.inverse);
  pc.curvature = riemann(pc.connection);
  return pc;
}

}  // namespace rigidh
