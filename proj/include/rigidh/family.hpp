#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rigidh/errors.hpp"
#include "rigidh/funcspec.hpp"

namespace rigidh {

enum class FamilyTag { T2211, T321, T33, T411, T51 };

inline constexpr std::array<FamilyTag, 5> kAllFamilies = {FamilyTag::T2211, FamilyTag::T321, FamilyTag::T33,
                                                          FamilyTag::T411, FamilyTag::T51};

constexpr std::string_view to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::T2211: return "2211";
    case FamilyTag::T321: return "321";
    case FamilyTag::T33: return "33";
    case FamilyTag::T411: return "411";
    case FamilyTag::T51: return "51";
  }
  return "?";
}

inline FamilyTag parse_family(std::string_view s) {
  for (FamilyTag t : kAllFamilies)
    if (to_string(t) == s) return t;
  throw Error(ErrorKind::ConfigInvalid, "unknown family '" + std::string(s) + "'");
}

/// Selects between the printed form of a few formulas and the corrected
/// reading that agrees with the brute-force curvature (see MISPRINTS.md).
enum class MisprintMode { Literal, Alt };

constexpr std::string_view to_string(MisprintMode m) { return m == MisprintMode::Literal ? "literal" : "alt"; }

inline MisprintMode parse_misprint_mode(std::string_view s) {
  if (s == "literal") return MisprintMode::Literal;
  if (s == "alt") return MisprintMode::Alt;
  throw Error(ErrorKind::ConfigInvalid, "misprint mode must be literal or alt");
}

/// Strict enforces every parameter constraint of the family. Relaxed drops
/// the [321] requirement that eps and eps_tilde are not both zero, which
/// the degenerate-flat sufficiency fixtures need.
enum class Validation { Strict, Relaxed };

/// Which optional ingredients a family's metric consumes.
struct FamilyUsage {
  bool eps_tilde = false;
  bool a = false;
  bool theta = false;
  bool omega = false;
  bool f5 = false;
  bool f6 = false;
  std::array<int, 4> signs{};  // 1-based sign indices, 0 = unused slot
};

constexpr FamilyUsage usage(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::T2211: return {true, true, true, true, true, true, {2, 4, 5, 6}};
    case FamilyTag::T321: return {true, true, true, true, false, true, {3, 5, 6, 0}};
    case FamilyTag::T33: return {true, true, true, true, false, false, {3, 6, 0, 0}};
    case FamilyTag::T411: return {false, false, true, false, true, true, {4, 5, 6, 0}};
    case FamilyTag::T51: return {false, false, true, false, false, true, {5, 6, 0, 0}};
  }
  return {};
}

struct FamilyConfig {
  FamilyTag family = FamilyTag::T2211;
  int eps = 0;
  int eps_tilde = 0;
  double a = 0.0;
  std::array<int, 7> e{0, 1, 1, 1, 1, 1, 1};  // e[1]..e[6]; e[0] unused
  FunctionSpec theta;
  FunctionSpec omega;
  FunctionSpec f5;
  FunctionSpec f6;
  Validation validation = Validation::Strict;
  MisprintMode misprints = MisprintMode::Literal;  // runtime switch, not serialized

  int sign(int k) const { return e.at(static_cast<std::size_t>(k)); }

  void validate() const {
    const FamilyUsage u = usage(family);
    auto bad = [](const std::string& msg) { throw Error(ErrorKind::ConfigInvalid, msg); };
    if (eps != 0 && eps != 1) bad("eps must be 0 or 1");
    if (eps_tilde != 0 && eps_tilde != 1) bad("eps_tilde must be 0 or 1");
    if (!u.eps_tilde && eps_tilde != 0) bad("eps_tilde is not used by this family");
    for (int k : u.signs)
      if (k != 0 && sign(k) != 1 && sign(k) != -1) bad("sign e" + std::to_string(k) + " must be +1 or -1");
    switch (family) {
      case FamilyTag::T2211:
        if (eps_tilde == 0 && a == 0.0) bad("[2211] requires a != 0 when eps_tilde = 0");
        break;
      case FamilyTag::T321:
        if (eps_tilde == 0 && a == 0.0) bad("[321] requires a != 0 when eps_tilde = 0");
        if (validation == Validation::Strict && eps == 0 && eps_tilde == 0)
          bad("[321] requires eps != 0 when eps_tilde = 0 and conversely");
        break;
      case FamilyTag::T33:
        if (eps_tilde == 0 && a == 0.0) bad("[33] requires a != 0 when eps_tilde = 0");
        if (eps == 0 && theta.is_zero()) bad("[33] requires theta nonzero when eps = 0");
        if (eps_tilde == 0 && omega.is_zero()) bad("[33] requires omega nonzero when eps_tilde = 0");
        break;
      case FamilyTag::T411:
      case FamilyTag::T51:
        break;
    }
  }
};

inline void to_json(nlohmann::json& j, const FamilyConfig& c) {
  const FamilyUsage u = usage(c.family);
  j = nlohmann::json::object();
  j["family"] = std::string(to_string(c.family));
  j["eps"] = c.eps;
  if (u.eps_tilde) j["eps_tilde"] = c.eps_tilde;
  if (u.a) j["a"] = c.a;
  nlohmann::json signs = nlohmann::json::object();
  for (int k : u.signs)
    if (k != 0) signs["e" + std::to_string(k)] = c.sign(k);
  j["signs"] = signs;
  if (u.theta) j["theta"] = c.theta;
  if (u.omega) j["omega"] = c.omega;
  if (u.f5) j["f5"] = c.f5;
  if (u.f6) j["f6"] = c.f6;
  if (c.validation == Validation::Relaxed) j["validation"] = "relaxed";
}

/// Parses and validates a family config. Unused fields must be absent or
/// null; unknown keys are rejected.
inline FamilyConfig parse_config(const nlohmann::json& j) {
  auto bad = [](const std::string& msg) { throw Error(ErrorKind::ConfigInvalid, msg); };
  if (!j.is_object()) bad("config must be a JSON object");
  if (!j.contains("family") || !j.at("family").is_string()) bad("missing \"family\"");

  FamilyConfig c;
  c.family = parse_family(j.at("family").get<std::string>());
  const FamilyUsage u = usage(c.family);

  static const std::set<std::string> known = {"family", "eps", "eps_tilde", "a", "signs", "theta",
                                              "omega",  "f5",  "f6",        "validation"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) bad("unknown key \"" + key + "\"");

  auto present = [&](const char* key) { return j.contains(key) && !j.at(key).is_null(); };
  auto get_int01 = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) bad(std::string(key) + " must be an integer");
    return v.get<int>();
  };
  auto get_fn = [&](const char* key, bool used, FunctionSpec& out) {
    if (used) {
      if (!present(key)) bad(std::string("missing function \"") + key + "\"");
      out = j.at(key).get<FunctionSpec>();
    } else if (present(key)) {
      bad(std::string("\"") + key + "\" is not used by family " + std::string(to_string(c.family)));
    }
  };

  if (!present("eps")) bad("missing \"eps\"");
  c.eps = get_int01("eps");
  if (u.eps_tilde) {
    if (!present("eps_tilde")) bad("missing \"eps_tilde\"");
    c.eps_tilde = get_int01("eps_tilde");
  } else if (present("eps_tilde")) {
    bad("\"eps_tilde\" is not used by this family");
  }
  if (u.a) {
    if (!present("a") || !j.at("a").is_number()) bad("missing numeric \"a\"");
    c.a = j.at("a").get<double>();
  } else if (present("a")) {
    bad("\"a\" is not used by this family");
  }

  if (!present("signs") || !j.at("signs").is_object()) bad("missing \"signs\" object");
  std::set<std::string> wanted;
  for (int k : u.signs)
    if (k != 0) wanted.insert("e" + std::to_string(k));
  for (const auto& [key, value] : j.at("signs").items()) {
    if (!wanted.contains(key)) bad("sign \"" + key + "\" is not used by this family");
    if (!value.is_number_integer()) bad("sign \"" + key + "\" must be an integer");
    c.e.at(static_cast<std::size_t>(std::stoi(key.substr(1)))) = value.get<int>();
  }
  for (const auto& key : wanted)
    if (!j.at("signs").contains(key)) bad("missing sign \"" + key + "\"");

  get_fn("theta", u.theta, c.theta);
  get_fn("omega", u.omega, c.omega);
  get_fn("f5", u.f5, c.f5);
  get_fn("f6", u.f6, c.f6);

  if (present("validation")) {
    const auto& v = j.at("validation");
    if (v == "relaxed") c.validation = Validation::Relaxed;
    else if (v == "strict") c.validation = Validation::Strict;
    else bad("validation must be \"strict\" or \"relaxed\"");
  }

  c.validate();
  return c;
}

}  // namespace rigidh
