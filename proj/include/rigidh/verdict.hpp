#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidh/closedform.hpp"
#include "rigidh/curvature.hpp"
#include "rigidh/errors.hpp"
#include "rigidh/family.hpp"
#include "rigidh/metric.hpp"
#include "rigidh/parallel.hpp"

namespace rigidh {

inline constexpr const char* kToolVersion = "rigidh 1.0.0";
inline constexpr int kReportSchema = 1;

struct Tolerances {
  double cond = 1e-9;  // condition scalars, relative
  double cc = 1e-8;    // constant-curvature residual, relative
  double K = 1e-9;     // per-point K spread, relative to max(1, |K|)
};

struct ConditionResult {
  std::string name;
  double value = 0.0;  // magnitude of the condition scalar (sup over points)
  bool pass = false;
};

struct ConditionCheck {
  FamilyTag family = FamilyTag::T2211;
  std::vector<ConditionResult> conditions;

  bool conditions_hold() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& r) { return r.pass; });
  }
};

namespace detail {

inline double quantity_scale(const ConditionQuantities& q) {
  double s = 1.0;
  for (const auto& [name, v] : q.named()) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace detail

/// Evaluates the family's constant-curvature conditions. The eps flags are
/// checked exactly from the config; f6' = 0 as a sup over the sampled x^6
/// values; the rho/gamma conditions as a sup over points, each divided by
/// max(1, largest condition quantity at that point).
inline ConditionCheck check_conditions(const FamilyConfig& c, std::span<const ChartPoint> points,
                                       double tol_cond = Tolerances{}.cond) {
  if (points.empty()) throw Error(ErrorKind::EmptySample, "no points to check conditions on");
  ConditionCheck out;
  out.family = c.family;
  auto exact = [&](const std::string& name, int v) { out.conditions.push_back({name, double(v), v == 0}); };
  auto sup = [&](const std::string& name, auto&& per_point) {
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, per_point(p));
    out.conditions.push_back({name, worst, worst < tol_cond});
  };
  auto f6_prime = [&](const ChartPoint& p) { return std::abs(c.f6.eval2(p.x[5]).d1); };

  switch (c.family) {
    case FamilyTag::T2211:
      exact("eps", c.eps);
      exact("eps_tilde", c.eps_tilde);
      sup("rho_p - rho_sigma_p", [&](const ChartPoint& p) {
        const auto q = condition_quantities(c, p);
        double w = 0.0;
        for (int pp : {2, 4})
          for (int s : {5, 6}) w = std::max(w, std::abs(q.rho(pp) - q.rho_sigma(s, pp)));
        return w / detail::quantity_scale(q);
      });
      sup("rho_p - rho_pq", [&](const ChartPoint& p) {
        const auto q = condition_quantities(c, p);
        const double w = std::max(std::abs(q.rho(2) - q.rho_pair(2, 4)), std::abs(q.rho(4) - q.rho_pair(2, 4)));
        return w / detail::quantity_scale(q);
      });
      break;
    case FamilyTag::T321:
      sup("f6_prime", f6_prime);
      exact("eps", c.eps);
      exact("eps_tilde", c.eps_tilde);
      break;
    case FamilyTag::T33:
      exact("eps", c.eps);
      exact("eps_tilde", c.eps_tilde);
      break;
    case FamilyTag::T411:
      sup("rho_4 - rho_sigma_4", [&](const ChartPoint& p) {
        const auto q = condition_quantities(c, p);
        const double w = std::max(std::abs(q.rho(4) - q.rho_sigma(5, 4)), std::abs(q.rho(4) - q.rho_sigma(6, 4)));
        return w / detail::quantity_scale(q);
      });
      exact("eps", c.eps);
      sup("gamma1", [&](const ChartPoint& p) {
        const auto q = condition_quantities(c, p);
        return std::abs(q.gamma1_value()) / detail::quantity_scale(q);
      });
      sup("gamma2", [&](const ChartPoint& p) {
        const auto q = condition_quantities(c, p);
        return std::abs(q.gamma2_value()) / detail::quantity_scale(q);
      });
      break;
    case FamilyTag::T51:
      sup("f6_prime", f6_prime);
      exact("eps", c.eps);
      break;
  }
  return out;
}

struct PointRecord {
  std::size_t index = 0;
  ChartPoint point;
  KFit fit;
  SymmetryResiduals symmetry;
  double max_abs_R = 0.0;
  std::map<std::string, double> quantities;
};

/// Outcome of the two-directional check. `consistent()` is derived from
/// the stored inputs and never cached.
struct TheoremVerdict {
  FamilyTag family = FamilyTag::T2211;
  ConditionCheck check;
  double numeric_K = 0.0;         // mean K over points
  double K_spread = 0.0;          // max K - min K
  double numeric_residual = 0.0;  // max residual_rel over points
  double residual_min = 0.0;
  Tolerances tol;

  bool conditions_hold() const { return check.conditions_hold(); }

  bool constant_curvature() const {
    return numeric_residual < tol.cc && K_spread < tol.K * std::max(1.0, std::abs(numeric_K));
  }

  bool consistent() const { return conditions_hold() == constant_curvature(); }
};

struct VerifyOptions {
  std::optional<Box> box;  // defaults to default_box(family)
  Tolerances tol;
  double min_distance = kMinSingularDistance;
};

struct Report {
  FamilyConfig config;
  std::uint64_t seed = 0;
  int samples = 0;
  Box box{};
  std::vector<PointRecord> points;
  TheoremVerdict verdict;
};

inline PointRecord analyse_point(const FamilyConfig& cfg, const ChartPoint& p, std::size_t index) {
  const PointCurvature pc = compute_curvature(cfg, p);
  PointRecord rec;
  rec.index = index;
  rec.point = p;
  rec.fit = fit_constant_curvature(pc.curvature);
  rec.symmetry = symmetry_residuals(pc.curvature);
  rec.max_abs_R = pc.curvature.max_abs();
  rec.quantities = condition_quantities(cfg, p).named();
  return rec;
}

/// Samples points, runs the brute-force pipeline on each in parallel and
/// evaluates the family conditions on the same sample.
inline Report run_verification(const FamilyConfig& cfg, int n, std::uint64_t seed, const VerifyOptions& opt = {}) {
  cfg.validate();
  Report rep;
  rep.config = cfg;
  rep.seed = seed;
  rep.samples = n;
  rep.box = opt.box.value_or(default_box(cfg.family));
  const auto points = sample_points(cfg, n, seed, rep.box, opt.min_distance);
  rep.points = detail::parallel_map<PointRecord>(points.size(), [&](std::size_t i) { return analyse_point(cfg, points[i], i); });

  TheoremVerdict& v = rep.verdict;
  v.family = cfg.family;
  v.tol = opt.tol;
  v.check = check_conditions(cfg, points, opt.tol.cond);
  double kmin = rep.points.front().fit.K;
  double kmax = kmin;
  double ksum = 0.0;
  v.residual_min = rep.points.front().fit.residual_rel;
  for (const auto& r : rep.points) {
    kmin = std::min(kmin, r.fit.K);
    kmax = std::max(kmax, r.fit.K);
    ksum += r.fit.K;
    v.numeric_residual = std::max(v.numeric_residual, r.fit.residual_rel);
    v.residual_min = std::min(v.residual_min, r.fit.residual_rel);
  }
  v.numeric_K = ksum / static_cast<double>(rep.points.size());
  v.K_spread = kmax - kmin;
  return rep;
}

inline TheoremVerdict verify_theorem(const FamilyConfig& cfg, int n, std::uint64_t seed, const VerifyOptions& opt = {}) {
  return run_verification(cfg, n, seed, opt).verdict;
}

inline nlohmann::json to_json(const SymmetryResiduals& s) {
  return {{"antisym1", s.antisym1}, {"antisym2", s.antisym2}, {"pairsym", s.pairsym}, {"bianchi1", s.bianchi1}};
}

inline nlohmann::json to_json(const Report& r) {
  using nlohmann::json;
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"index", p.index},
                      {"x", p.point.x},
                      {"K", p.fit.K},
                      {"residual_rel", p.fit.residual_rel},
                      {"max_abs_R", p.max_abs_R},
                      {"sym_residuals", to_json(p.symmetry)},
                      {"quantities", p.quantities}});
  }
  json conditions = json::object();
  for (const auto& c : r.verdict.check.conditions) conditions[c.name] = {{"value", c.value}, {"pass", c.pass}};
  json box = json::array();
  for (const auto& iv : r.box) box.push_back({iv.lo, iv.hi});
  const TheoremVerdict& v = r.verdict;
  return {{"schema", kReportSchema},
          {"tool_version", kToolVersion},
          {"seed", r.seed},
          {"samples", r.samples},
          {"misprint_mode", std::string(to_string(r.config.misprints))},
          {"box", box},
          {"config", r.config},
          {"tolerances", {{"cond", v.tol.cond}, {"cc", v.tol.cc}, {"K", v.tol.K}}},
          {"points", points},
          {"aggregate",
           {{"K_mean", v.numeric_K},
            {"K_spread", v.K_spread},
            {"residual_max", v.numeric_residual},
            {"residual_min", v.residual_min},
            {"conditions", conditions},
            {"conditions_hold", v.conditions_hold()},
            {"constant_curvature", v.constant_curvature()},
            {"verdict", v.consistent() ? "consistent" : "inconsistent"}}}};
}

}  // namespace rigidh
