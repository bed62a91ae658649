#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rigidh/closedform.hpp"
#include "rigidh/curvature.hpp"
#include "rigidh/verdict.hpp"

namespace rigidh {

enum ExitCode : int { kExitPass = 0, kExitInconsistent = 1, kExitUsage = 2 };

inline FamilyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

/// Accepts "LO:HI" (all coordinates) or six comma-separated "LO:HI" pairs.
inline Box parse_box(const std::string& text) {
  auto parse_interval = [](const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::PreconditionViolation, "box interval must be LO:HI");
    try {
      return Interval{std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
    } catch (const std::exception&) {
      throw Error(ErrorKind::PreconditionViolation, "box interval must be numeric LO:HI");
    }
  };
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  Box b;
  if (parts.size() == 1) {
    b.fill(parse_interval(parts[0]));
  } else if (parts.size() == kDim) {
    for (std::size_t k = 0; k < kDim; ++k) b[k] = parse_interval(parts[k]);
  } else {
    throw Error(ErrorKind::PreconditionViolation, "box needs one or six intervals");
  }
  for (const auto& iv : b)
    if (!(iv.lo <= iv.hi)) throw Error(ErrorKind::PreconditionViolation, "box interval has LO > HI");
  return b;
}

/// Symmetric h field plus phi gradient, both assembled from univariate
/// polynomial terms in single chart coordinates:
///   {"metric_multiple": c,
///    "h":   [{"i":1,"j":2,"var":3,"coeffs":[...]}, ...],
///    "phi": [{"var":1,"coeffs":[...]}, ...]}
/// h_ij = c g_ij + sum of its terms; phi = sum of its terms.
struct EisenhartFields {
  double metric_multiple = 0.0;
  struct HTerm {
    int i = 1, j = 1, var = 1;
    FunctionSpec f;
  };
  struct PhiTerm {
    int var = 1;
    FunctionSpec f;
  };
  std::vector<HTerm> h;
  std::vector<PhiTerm> phi;

  Mat6<Jet2> h_at(const MetricJet& m, const ChartPoint& p) const {
    Mat6<Jet2> out = m.g;
    for (auto& row : out)
      for (auto& v : row) v *= metric_multiple;
    for (const auto& t : h) {
      const auto i = static_cast<std::size_t>(t.i - 1);
      const auto j = static_cast<std::size_t>(t.j - 1);
      const auto k = static_cast<std::size_t>(t.var - 1);
      const Jet2 v = compose(t.f, Jet2::variable(k, p.x[k]));
      out[i][j] += v;
      if (i != j) out[j][i] += v;
    }
    return out;
  }

  std::array<double, kDim> phi_grad(const ChartPoint& p) const {
    std::array<double, kDim> g{};
    for (const auto& t : phi) {
      const auto k = static_cast<std::size_t>(t.var - 1);
      g[k] += t.f.eval2(p.x[k]).d1;
    }
    return g;
  }
};

inline EisenhartFields parse_fields(const nlohmann::json& j) {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::ConfigInvalid, m); };
  auto index = [&](const nlohmann::json& o, const char* key) {
    if (!o.contains(key) || !o.at(key).is_number_integer()) bad(std::string("field term needs integer \"") + key + "\"");
    const int v = o.at(key).get<int>();
    if (v < 1 || v > 6) bad(std::string("\"") + key + "\" must be in 1..6");
    return v;
  };
  if (!j.is_object()) bad("fields must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "metric_multiple" && key != "h" && key != "phi") bad("unknown fields key \"" + key + "\"");
  EisenhartFields f;
  if (j.contains("metric_multiple")) f.metric_multiple = j.at("metric_multiple").get<double>();
  if (j.contains("h"))
    for (const auto& t : j.at("h"))
      f.h.push_back({index(t, "i"), index(t, "j"), index(t, "var"), nlohmann::json{{"coeffs", t.at("coeffs")}}.get<FunctionSpec>()});
  if (j.contains("phi"))
    for (const auto& t : j.at("phi"))
      f.phi.push_back({index(t, "var"), nlohmann::json{{"coeffs", t.at("coeffs")}}.get<FunctionSpec>()});
  return f;
}

/// Relative error used by the closed-form cross-check: components are
/// compared relative to their own size, floored at 1e-6 of the largest
/// brute-force component so structural zeros compare on the tensor scale.
inline double crosscheck_error(double brute, double predicted, double tensor_scale) {
  return std::abs(brute - predicted) / std::max({std::abs(brute), std::abs(predicted), 1e-6 * tensor_scale, 1e-300});
}

struct CrosscheckEntry {
  std::size_t point = 0;
  Index4 index;
  std::string group;
  double predicted = 0.0;
  double brute = 0.0;
  double rel_err = 0.0;
};

inline PredictedMap predicted_for(const FamilyConfig& cfg, const ChartPoint& p) {
  return cfg.family == FamilyTag::T2211 ? predicted_components_2211(cfg, p) : predicted_anchor_components(cfg, p);
}

/// Closed-form vs brute-force comparison over a point sample. `perturb`
/// scales one named component group, for exercising the detector.
inline std::vector<CrosscheckEntry> crosscheck(const FamilyConfig& cfg, std::span<const ChartPoint> points,
                                               const std::string& perturb = {}, double perturb_factor = 1.001) {
  auto per_point = detail::parallel_map<std::vector<CrosscheckEntry>>(points.size(), [&](std::size_t n) {
    const PointCurvature pc = compute_curvature(cfg, points[n]);
    const double scale = pc.curvature.max_abs();
    std::vector<CrosscheckEntry> out;
    for (const auto& [ix, pred] : predicted_for(cfg, points[n])) {
      CrosscheckEntry e;
      e.point = n;
      e.index = ix;
      e.group = pred.group;
      e.predicted = pred.group == perturb ? pred.value * perturb_factor : pred.value;
      e.brute = component(pc.curvature.r, ix);
      e.rel_err = crosscheck_error(e.brute, e.predicted, scale);
      out.push_back(e);
    }
    return out;
  });
  std::vector<CrosscheckEntry> all;
  for (auto& v : per_point) all.insert(all.end(), v.begin(), v.end());
  return all;
}

namespace detail {

inline void write_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::PreconditionViolation, "cannot write '" + path + "'");
  f << j.dump(2) << '\n';
}

}  // namespace detail

/// Entry point of the command-line tool. Exit 0 = pass/consistent,
/// 1 = inconsistency or discrepancy found, 2 = usage or config error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Constant-curvature verification workbench for rigid 6-dimensional h-spaces"};
  app.require_subcommand(1);

  std::string config_path, out_path, box_text, misprint = "literal";
  int samples = 20;
  std::uint64_t seed = 1;
  Tolerances tol;

  auto common = [&](CLI::App* sub, int default_samples) {
    sub->add_option("--config", config_path, "family config JSON")->required();
    sub->add_option("--samples", samples, "number of sample points")->default_val(default_samples);
    sub->add_option("--seed", seed, "sampler seed")->default_val(1);
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--box", box_text, "sampling box LO:HI or six comma-separated LO:HI");
    sub->add_option("--misprint-mode", misprint, "literal|alt")->check(CLI::IsMember({"literal", "alt"}));
  };

  auto* check = app.add_subcommand("check", "verify the constant-curvature theorem for one config");
  common(check, 20);
  check->add_option("--tol-cc", tol.cc, "constant-curvature residual tolerance");
  check->add_option("--tol-cond", tol.cond, "condition scalar tolerance");
  check->add_option("--tol-k", tol.K, "per-point K spread tolerance");

  auto* cross = app.add_subcommand("crosscheck", "compare closed-form components with brute force");
  common(cross, 5);
  double cross_tol = 1e-8;
  std::string perturb;
  cross->add_option("--tol", cross_tol, "relative agreement tolerance");
  cross->add_option("--perturb", perturb, "scale one component group by 1.001 (detector sanity)");

  auto* eis = app.add_subcommand("eisenhart", "Eisenhart-equation residual for user-supplied h and phi");
  common(eis, 10);
  std::string fields_path, comma = "covariant";
  double eis_tol = 1e-12;
  eis->add_option("--fields", fields_path, "h/phi field JSON")->required();
  eis->add_option("--comma", comma, "covariant|partial")->check(CLI::IsMember({"covariant", "partial"}));
  eis->add_option("--tol", eis_tol, "residual tolerance relative to max(1, max|g|)");

  auto* sample = app.add_subcommand("sample", "emit accepted sample points");
  common(sample, 20);
  std::string format = "json";
  sample->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitPass;
    }
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    FamilyConfig cfg = load_config(config_path);
    cfg.misprints = parse_misprint_mode(misprint);
    const Box box = box_text.empty() ? default_box(cfg.family) : parse_box(box_text);

    if (check->parsed()) {
      VerifyOptions opt;
      opt.box = box;
      opt.tol = tol;
      const Report rep = run_verification(cfg, samples, seed, opt);
      detail::write_json(to_json(rep), out_path, out);
      if (!rep.verdict.consistent()) {
        err << "inconsistent: conditions_hold=" << rep.verdict.conditions_hold()
            << " constant_curvature=" << rep.verdict.constant_curvature() << '\n';
        return kExitInconsistent;
      }
      return kExitPass;
    }

    const auto points = sample_points(cfg, samples, seed, box);

    if (cross->parsed()) {
      if (cfg.family == FamilyTag::T51) throw Error(ErrorKind::IndexNotInFamily, "no closed-form components for [51]");
      const auto entries = crosscheck(cfg, points, perturb);
      std::map<std::string, double> worst;
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& e : entries) {
        worst[e.group] = std::max(worst[e.group], e.rel_err);
        rows.push_back({{"point", e.point},
                        {"component", e.index.name()},
                        {"group", e.group},
                        {"predicted", e.predicted},
                        {"brute_force", e.brute},
                        {"rel_err", e.rel_err}});
      }
      nlohmann::json groups = nlohmann::json::object();
      std::vector<std::string> discrepant;
      for (const auto& [g, w] : worst) {
        groups[g] = {{"max_rel_err", w}, {"pass", w < cross_tol}};
        if (!(w < cross_tol)) discrepant.push_back(g);
      }
      nlohmann::json report = {{"schema", kReportSchema},
                               {"tool_version", kToolVersion},
                               {"seed", seed},
                               {"samples", samples},
                               {"misprint_mode", misprint},
                               {"config", cfg},
                               {"tolerance", cross_tol},
                               {"groups", groups},
                               {"discrepant_groups", discrepant},
                               {"components", rows}};
      detail::write_json(report, out_path, out);
      if (!discrepant.empty()) {
        err << "discrepant component groups:";
        for (const auto& g : discrepant) err << ' ' << g;
        err << '\n';
        return kExitInconsistent;
      }
      return kExitPass;
    }

    if (eis->parsed()) {
      std::ifstream in(fields_path);
      if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot open fields file '" + fields_path + "'");
      nlohmann::json fj;
      try {
        in >> fj;
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ConfigInvalid, std::string("malformed fields JSON: ") + e.what());
      }
      const EisenhartFields fields = parse_fields(fj);
      const CommaMode mode = comma == "partial" ? CommaMode::Partial : CommaMode::Covariant;
      nlohmann::json rows = nlohmann::json::array();
      bool ok = true;
      double worst = 0.0;
      for (std::size_t n = 0; n < points.size(); ++n) {
        const PointCurvature pc = compute_curvature(cfg, points[n]);
        const double res =
            eisenhart_residual(pc.metric, pc.connection, fields.h_at(pc.metric, points[n]), fields.phi_grad(points[n]), mode);
        const double rel = res / std::max(1.0, max_abs(pc.metric.values()));
        worst = std::max(worst, rel);
        ok = ok && rel < eis_tol;
        rows.push_back({{"point", n}, {"x", points[n].x}, {"residual", res}, {"residual_rel", rel}});
      }
      detail::write_json({{"schema", kReportSchema},
                          {"tool_version", kToolVersion},
                          {"config", cfg},
                          {"comma", comma},
                          {"points", rows},
                          {"residual_rel_max", worst},
                          {"pass", ok}},
                         out_path, out);
      return ok ? kExitPass : kExitInconsistent;
    }

    if (sample->parsed()) {
      if (format == "csv") {
        std::ostringstream s;
        s << std::setprecision(17) << "x1,x2,x3,x4,x5,x6\n";
        for (const auto& p : points) {
          for (std::size_t k = 0; k < kDim; ++k) s << (k ? "," : "") << p.x[k];
          s << '\n';
        }
        if (out_path.empty() || out_path == "-") {
          out << s.str();
        } else {
          std::ofstream f(out_path);
          if (!f) throw Error(ErrorKind::PreconditionViolation, "cannot write '" + out_path + "'");
          f << s.str();
        }
      } else {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : points) pts.push_back(p.x);
        detail::write_json({{"schema", kReportSchema}, {"seed", seed}, {"config", cfg}, {"points", pts}}, out_path, out);
      }
      return kExitPass;
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace rigidh
