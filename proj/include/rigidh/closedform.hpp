#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidh/errors.hpp"
#include "rigidh/family.hpp"
#include "rigidh/curvature.hpp"
#include "rigidh/metric.hpp"

namespace rigidh {

/// Closed-form condition quantities of a family at one point. Every entry
/// is computed from the exact polynomial derivatives of the function specs
/// and plain metric values, never from jets.
///
/// Index conventions are 1-based coordinate labels: for [2211] p, q are 2
/// and 4 and sigma runs over the simple roots 5, 6; for [321] p, q are 3
/// and 5 with sigma = 6; for [411] p = 4 and sigma = 5, 6.
struct ConditionQuantities {
  FamilyTag family = FamilyTag::T2211;
  std::map<int, double> rho_p;
  std::map<std::pair<int, int>, double> rho_pq;
  std::map<std::pair<int, int>, double> rho_sigma_p;  // key (sigma, p)
  std::map<int, double> B_p;
  std::map<int, double> chi_p;
  std::optional<double> gamma;   // [321]
  std::optional<double> gamma1;  // [411]
  std::optional<double> gamma2;  // [411]

  double rho(int p) const { return lookup(rho_p, p, "rho_" + std::to_string(p)); }
  double rho_pair(int p, int q) const {
    return lookup(rho_pq, {p, q}, "rho_" + std::to_string(p) + std::to_string(q));
  }
  double rho_sigma(int sigma, int p) const {
    return lookup(rho_sigma_p, {sigma, p}, "rho_" + std::to_string(sigma) + std::to_string(p));
  }
  double chi(int p) const { return lookup(chi_p, p, "chi_" + std::to_string(p)); }
  double B(int p) const { return lookup(B_p, p, "B_" + std::to_string(p)); }
  double gamma_value() const { return opt(gamma, "gamma"); }
  double gamma1_value() const { return opt(gamma1, "gamma1"); }
  double gamma2_value() const { return opt(gamma2, "gamma2"); }

  /// Flat name -> value view, e.g. "rho_2", "rho_24", "rho_52", "gamma1".
  std::map<std::string, double> named() const {
    std::map<std::string, double> out;
    for (const auto& [p, v] : rho_p) out["rho_" + std::to_string(p)] = v;
    for (const auto& [k, v] : rho_pq)
      if (k.first < k.second) out["rho_" + std::to_string(k.first) + std::to_string(k.second)] = v;
    for (const auto& [k, v] : rho_sigma_p) out["rho_" + std::to_string(k.first) + std::to_string(k.second)] = v;
    for (const auto& [p, v] : B_p) out["B_" + std::to_string(p)] = v;
    for (const auto& [p, v] : chi_p) out["chi_" + std::to_string(p)] = v;
    if (gamma) out["gamma"] = *gamma;
    if (gamma1) out["gamma1"] = *gamma1;
    if (gamma2) out["gamma2"] = *gamma2;
    return out;
  }

 private:
  template <class K>
  static double lookup(const std::map<K, double>& m, const K& key, const std::string& name) {
    auto it = m.find(key);
    if (it == m.end()) throw Error(ErrorKind::IndexNotInFamily, name + " is not defined for this family");
    return it->second;
  }
  static double opt(const std::optional<double>& v, const std::string& name) {
    if (!v) throw Error(ErrorKind::IndexNotInFamily, name + " is not defined for this family");
    return *v;
  }
};

namespace detail {

/// Roots, derivatives of the simple-root functions and diagonal metric
/// entries needed by the rho sums.
struct RootData {
  std::array<double, kDim> f{};    // f_1..f_6 (0-based storage)
  std::map<int, double> d1;        // f'_sigma
  std::map<int, double> d2;        // f''_sigma
  std::map<int, double> g_diag;    // g_{sigma sigma}
  std::vector<int> simple;         // sigma labels
  Matrix6 g{};
};

inline RootData root_data(const FamilyConfig& c, const ChartPoint& p) {
  RootData d;
  d.g = metric_values(c, p);
  d.f = characteristic_roots<double>(c, p.x);
  auto add = [&](int sigma, const FunctionSpec& fn) {
    const Taylor2 t = fn.eval2(p.x[static_cast<std::size_t>(sigma - 1)]);
    d.d1[sigma] = t.d1;
    d.d2[sigma] = t.d2;
    d.g_diag[sigma] = d.g[static_cast<std::size_t>(sigma - 1)][static_cast<std::size_t>(sigma - 1)];
    d.simple.push_back(sigma);
  };
  switch (c.family) {
    case FamilyTag::T2211:
    case FamilyTag::T411:
      add(5, c.f5);
      add(6, c.f6);
      break;
    case FamilyTag::T321:
      add(6, c.f6);
      break;
    case FamilyTag::T33:
    case FamilyTag::T51:
      break;
  }
  return d;
}

inline double root(const RootData& d, int label) { return d.f[static_cast<std::size_t>(label - 1)]; }

inline double rho_single(const RootData& d, double fp) {
  double s = 0.0;
  for (int sg : d.simple) {
    const double fs = root(d, sg);
    s += d.d1.at(sg) * d.d1.at(sg) * inv((fs - fp) * (fs - fp) * d.g_diag.at(sg));
  }
  return -0.25 * s;
}

inline double rho_pair(const RootData& d, double fp, double fq) {
  double s = 0.0;
  for (int sg : d.simple) {
    const double fs = root(d, sg);
    s += d.d1.at(sg) * d.d1.at(sg) * inv((fs - fp) * (fs - fq) * d.g_diag.at(sg));
  }
  return -0.25 * s;
}

/// rho_{sigma p} with the first brace distributed so that f'_sigma = 0
/// never produces 0/0.
inline double rho_sigma(const RootData& d, int sigma, double fp) {
  const double fs = root(d, sigma);
  const double gss = d.g_diag.at(sigma);
  const double d1 = d.d1.at(sigma);
  const double d2 = d.d2.at(sigma);
  double others = 0.0;
  for (std::size_t i = 0; i < kDim; ++i)
    if (static_cast<int>(i) + 1 != sigma) others += inv(d.f[i] - fs);
  double v = -0.25 * 2.0 * d2 * inv((fs - fp) * gss);
  v -= 0.25 * d1 * d1 * inv((fs - fp) * gss) * (-inv(fs - fp) + others);
  for (int gm : d.simple) {
    if (gm == sigma) continue;
    const double fg = root(d, gm);
    v -= 0.25 * d.d1.at(gm) * d.d1.at(gm) * inv((fg - fp) * (fg - fs) * d.g_diag.at(gm));
  }
  return v;
}

// d(rho_sigma)/d(f_p) with the root values inside the sum over i held fixed.
inline double rho_sigma_slope(const RootData& d, int sigma, double fp) {
  const double fs = root(d, sigma);
  const double gss = d.g_diag.at(sigma);
  const double d1 = d.d1.at(sigma);
  const double d2 = d.d2.at(sigma);
  double others = 0.0;
  for (std::size_t i = 0; i < kDim; ++i)
    if (static_cast<int>(i) + 1 != sigma) others += inv(d.f[i] - fs);
  const double u = inv(fs - fp);
  double v = -0.5 * d2 * u * u / gss;
  v -= 0.25 * d1 * d1 / gss * (-2.0 * u * u * u + others * u * u);
  for (int gm : d.simple) {
    if (gm == sigma) continue;
    const double fg = root(d, gm);
    const double w = inv(fg - fp);
    v -= 0.25 * d.d1.at(gm) * d.d1.at(gm) * w * w * inv((fg - fs) * d.g_diag.at(gm));
  }
  return v;
}

inline double gamma_power(const RootData& d, double fp, int power) {
  double s = 0.0;
  for (int sg : d.simple) {
    const double fs = root(d, sg);
    s += d.d1.at(sg) * d.d1.at(sg) * inv(std::pow(fs - fp, power) * d.g_diag.at(sg));
  }
  return -0.25 * s;
}

template <class F>
auto singular_guard(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DivisionNearZero) throw Error(ErrorKind::SingularPoint, e.what());
    throw;
  }
}

}  // namespace detail

inline ConditionQuantities condition_quantities(const FamilyConfig& c, const ChartPoint& p) {
  return detail::singular_guard([&] {
    using namespace detail;
    const RootData d = root_data(c, p);
    const auto& x = p.x;
    ConditionQuantities q;
    q.family = c.family;
    switch (c.family) {
      case FamilyTag::T2211: {
        const double f2 = root(d, 2);
        const double f4 = root(d, 4);
        q.rho_p[2] = rho_single(d, f2);
        q.rho_p[4] = rho_single(d, f4);
        q.rho_pq[{2, 4}] = q.rho_pq[{4, 2}] = detail::rho_pair(d, f2, f4);
        for (int sg : d.simple) {
          q.rho_sigma_p[{sg, 2}] = detail::rho_sigma(d, sg, f2);
          q.rho_sigma_p[{sg, 4}] = detail::rho_sigma(d, sg, f4);
        }
        const double A = c.eps * x[0] + c.theta(x[1]);
        const double At = c.eps_tilde * x[2] + c.omega(x[3]);
        q.B_p[2] = c.eps * c.theta.eval2(x[1]).d1 * inv(A * A * d.g[0][1]);
        q.B_p[4] = c.eps_tilde * c.omega.eval2(x[3]).d1 * inv(At * At * d.g[2][3]);
        for (int pp : {2, 4}) q.chi_p[pp] = q.B_p[pp] + q.rho_p[pp];
        break;
      }
      case FamilyTag::T321: {
        const double f3 = root(d, 3);
        const double f5 = root(d, 5);
        q.rho_p[3] = rho_single(d, f3);
        q.rho_p[5] = rho_single(d, f5);
        q.rho_pq[{3, 5}] = q.rho_pq[{5, 3}] = detail::rho_pair(d, f3, f5);
        q.rho_sigma_p[{6, 3}] = detail::rho_sigma(d, 6, f3);
        q.rho_sigma_p[{6, 5}] = detail::rho_sigma(d, 6, f5);
        const double A = c.eps * x[1] + c.theta(x[2]);
        const double At = c.eps_tilde * x[3] + c.omega(x[4]);
        q.B_p[3] = 3.0 * c.eps * c.eps * inv(16.0 * A * A * d.g[1][1]);
        const double slope =
            c.misprints == MisprintMode::Literal ? c.theta.eval2(x[2]).d1 : c.omega.eval2(x[4]).d1;
        q.B_p[5] = c.eps_tilde * slope * inv(At * At * d.g[3][4]);
        for (int pp : {3, 5}) q.chi_p[pp] = q.B_p[pp] + q.rho_p[pp];
        q.gamma = gamma_power(d, f3, 3);
        break;
      }
      case FamilyTag::T411: {
        const double f4 = root(d, 4);
        q.rho_p[4] = rho_single(d, f4);
        for (int sg : d.simple) q.rho_sigma_p[{sg, 4}] = detail::rho_sigma(d, sg, f4);
        q.gamma1 = gamma_power(d, f4, 3);
        q.gamma2 = gamma_power(d, f4, 4);
        break;
      }
      case FamilyTag::T33:
      case FamilyTag::T51:
        break;
    }
    return q;
  });
}

/// 1-based component label R^i_{jkl}.
struct Index4 {
  int i = 1, j = 1, k = 1, l = 1;

  auto operator<=>(const Index4&) const = default;

  std::string name() const {
    return "R^" + std::to_string(i) + "_" + std::to_string(j) + std::to_string(k) + std::to_string(l);
  }
};

inline double component(const Tensor4<double>& r, const Index4& ix) {
  return r[static_cast<std::size_t>(ix.i - 1)][static_cast<std::size_t>(ix.j - 1)][static_cast<std::size_t>(ix.k - 1)]
          [static_cast<std::size_t>(ix.l - 1)];
}

struct PredictedComponent {
  double value = 0.0;
  std::string group;  // named component family, used in discrepancy reports
};

using PredictedMap = std::map<Index4, PredictedComponent>;

/// Predicted nonzero curvature components of the [2211] metric, grouped in
/// five families:
///  block      R^a_{bac}     = chi_p g_bc                         (a != c)
///  sigma_mix  R^s_{bsc}     = rho_sp g_bc - [b=p] T_sp g_{a'c}
///  sigma_diag R^a_{sbs}     = g_ss (rho_sp [a=b] - [b=p][a!=b] T_sp)
///  sigma_tau  R^t_{sts}     = g_ss (rho_tp (f_t-f_p) - rho_sp (f_s-f_p)) / (f_t-f_s)
///  pq_cross   R^{a_p}_{a_q b_p b_q}
/// where T_sp = (chi_p - rho_sp) A_p / (f_s - f_p) and a' is the block index
/// other than p (1 for p = 2, 3 for p = 4).
inline PredictedMap predicted_components_2211(const FamilyConfig& c, const ChartPoint& pt) {
  if (c.family != FamilyTag::T2211)
    throw Error(ErrorKind::IndexNotInFamily, "predicted_components_2211 requires family 2211");
  return detail::singular_guard([&] {
    const ConditionQuantities q = condition_quantities(c, pt);
    const Matrix6 G = metric_values(c, pt);
    const auto f = characteristic_roots<double>(c, pt.x);
    const auto& x = pt.x;
    auto g = [&](int a, int b) { return G[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)]; };
    auto fr = [&](int a) { return f[static_cast<std::size_t>(a - 1)]; };
    const std::map<int, std::array<int, 2>> block = {{2, {1, 2}}, {4, {3, 4}}};
    const std::map<int, double> A = {{2, c.eps * x[0] + c.theta(x[1])}, {4, c.eps_tilde * x[2] + c.omega(x[3])}};
    auto other = [&](int p, int b) { return block.at(p)[0] == b ? block.at(p)[1] : block.at(p)[0]; };
    const double sum_sign = c.misprints == MisprintMode::Literal ? 1.0 : -1.0;

    PredictedMap out;
    for (int p : {2, 4}) {
      const auto& bl = block.at(p);
      for (int a : bl)
        for (int b : bl)
          for (int cc : bl)
            if (cc != a) out[{a, b, a, cc}] = {q.chi(p) * g(b, cc), "block"};

      for (int s : {5, 6}) {
        const double rsp = q.rho_sigma(s, p);
        const double tail = (q.chi(p) - rsp) * A.at(p) * inv(fr(s) - fr(p));
        const int abar = bl[0];
        for (int b : bl)
          for (int cc : bl) out[{s, b, s, cc}] = {rsp * g(b, cc) - (b == p ? tail * g(abar, cc) : 0.0), "sigma_mix"};
        for (int a : bl)
          for (int b : bl) {
            const double v = (a == b ? rsp : 0.0) - (b == p && a != b ? tail : 0.0);
            out[{a, s, b, s}] = {g(s, s) * v, "sigma_diag"};
          }
      }
    }
    for (auto [s, t] : {std::pair{5, 6}, std::pair{6, 5}}) {
      const int p = 2;
      const double v = g(s, s) * (q.rho_sigma(t, p) * (fr(t) - fr(p)) - q.rho_sigma(s, p) * (fr(s) - fr(p))) *
                       inv(fr(t) - fr(s));
      out[{t, s, t, s}] = {v, "sigma_tau"};
    }
    const double rpq = q.rho_pair(2, 4);
    for (auto [p, qq] : {std::pair{2, 4}, std::pair{4, 2}}) {
      const double lsum = (q.chi(2) - rpq) + (q.chi(4) - rpq);
      for (int ap : block.at(p))
        for (int bp : block.at(p))
          for (int aq : block.at(qq))
            for (int bq : block.at(qq)) {
              const int cp = other(p, bp);
              const int cq = other(qq, bq);
              const bool first = ap == bp;
              const bool second = bp == p && ap == cp;
              if (!first && !second) continue;
              double v = 0.0;
              if (first)
                v += rpq * g(aq, bq) -
                     (bq == qq ? (q.chi(qq) - rpq) * A.at(qq) * inv(fr(p) - fr(qq)) * g(aq, cq) : 0.0);
              if (second) {
                const double d = fr(qq) - fr(p);
                v -= (q.chi(p) - rpq) * A.at(p) * inv(d) * g(aq, bq) +
                     (bq == qq ? sum_sign * lsum * A.at(p) * A.at(qq) * inv(d * d) * g(aq, cq) : 0.0);
              }
              out[{ap, aq, bp, bq}] = {v, "pq_cross"};
            }
    }
    return out;
  });
}

/// Components stated explicitly for the [321], [33] and [411] families.
inline PredictedMap predicted_anchor_components(const FamilyConfig& c, const ChartPoint& pt) {
  return detail::singular_guard([&] {
    const Matrix6 G = metric_values(c, pt);
    auto g = [&](int a, int b) { return G[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)]; };
    const auto& x = pt.x;
    const double eps = c.eps;
    const bool alt = c.misprints == MisprintMode::Alt;
    PredictedMap out;
    switch (c.family) {
      case FamilyTag::T321: {
        const ConditionQuantities q = condition_quantities(c, pt);
        const double A = eps * x[1] + c.theta(x[2]);
        const auto f = characteristic_roots<double>(c, x);
        const double s1 = inv(f[5] - f[2]) + 2.0 * inv(f[4] - f[2]);
        const double thp = c.theta.eval2(x[2]).d1;
        out[{2, 1, 2, 3}] = {q.chi(3) * g(1, 3), "chi_3"};
        out[{5, 1, 5, 3}] = {q.rho_pair(3, 5) * g(1, 3), "rho_53"};
        out[{6, 1, 6, 3}] = {q.rho_sigma(6, 3) * g(1, 3), "rho_63"};
        out[{4, 4, 4, 5}] = {q.chi(5) * g(4, 5), "chi_5"};
        out[{3, 4, 3, 5}] = {q.rho_pair(3, 5) * g(4, 5), "rho_53"};
        out[{6, 4, 6, 5}] = {q.rho_sigma(6, 5) * g(4, 5), "rho_65"};
        out[{1, 1, 2, 3}] = {q.gamma_value() * g(1, 3) + 3.0 * eps * eps * s1 * inv(8.0 * A) +
                                 3.0 * eps * inv(4.0 * A * A) * (thp - eps * eps * x[0]),
                             "gamma"};
        break;
      }
      case FamilyTag::T33: {
        const double A = eps * x[1] + c.theta(x[2]);
        const double At = a_tilde_33(c, x);
        out[{2, 1, 2, 3}] = {3.0 * eps * eps * inv(8.0 * A), "eps_block"};
        out[{5, 4, 5, 6}] = {3.0 * c.eps_tilde * c.eps_tilde * inv(8.0 * At), "eps_tilde_block"};
        break;
      }
      case FamilyTag::T411: {
        const ConditionQuantities q = condition_quantities(c, pt);
        const double A = eps * x[2] + c.theta(x[3]);
        const auto f = characteristic_roots<double>(c, x);
        const double s1 = inv(f[4] - f[3]) + inv(f[5] - f[3]);
        const double thp = c.theta.eval2(x[3]).d1;
        const double r4 = q.rho(4);
        const double g1 = q.gamma1_value();
        const double g2 = q.gamma2_value();
        out[{1, 1, 1, 4}] = {r4 * g(1, 4), "rho_4"};
        out[{1, 2, 1, 4}] = {r4 * g(2, 4) + (alt ? g1 * g(1, 4) + 2.0 * eps * eps * inv(3.0 * A) : 0.0), "rho_4_tail"};
        for (int s : {5, 6}) {
          out[{s, 1, s, 4}] = {q.rho_sigma(s, 4) * g(1, 4), "rho_s4"};
          const double slope = alt ? detail::rho_sigma_slope(detail::root_data(c, pt), s, f[3]) * g(1, 4) : 0.0;
          out[{s, 2, s, 4}] = {q.rho_sigma(s, 4) * g(2, 4) + slope, "rho_s4_tail"};
        }
        out[{1, 2, 2, 4}] = {g1 * g(2, 4) + g2 * g(1, 4) + 2.0 * eps * inv(3.0 * A * A) * (thp - 4.0 / 3.0 * eps * eps * x[1]) +
                                 (alt ? 8.0 * eps * eps * s1 * inv(3.0 * A) : 0.0),
                             "gamma_tail"};
        break;
      }
      case FamilyTag::T2211:
      case FamilyTag::T51:
        throw Error(ErrorKind::IndexNotInFamily, "no anchor components for this family");
    }
    return out;
  });
}

}  // namespace rigidh
