#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidh/errors.hpp"
#include "rigidh/jet.hpp"

namespace rigidh {

struct Taylor2 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Polynomial stand-in for the arbitrary single-variable functions of the
/// canonical metrics (theta, omega, f5, f6). Coefficients ascend in degree.
class FunctionSpec {
 public:
  static constexpr std::size_t kMaxDegree = 8;

  FunctionSpec() = default;

  explicit FunctionSpec(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() > kMaxDegree + 1)
      throw Error(ErrorKind::ConfigInvalid, "function spec degree exceeds 8");
  }

  static FunctionSpec constant(double c) { return FunctionSpec({c}); }
  static FunctionSpec identity() { return FunctionSpec({0.0, 1.0}); }

  const std::vector<double>& coeffs() const { return coeffs_; }

  bool is_zero() const {
    for (double c : coeffs_)
      if (c != 0.0) return false;
    return true;
  }

  bool is_constant() const {
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
      if (coeffs_[i] != 0.0) return false;
    return true;
  }

  /// Value, first and second derivative by a single Horner sweep.
  Taylor2 eval2(double t) const {
    Taylor2 r;
    for (std::size_t k = coeffs_.size(); k-- > 0;) {
      r.d2 = r.d2 * t + 2.0 * r.d1;
      r.d1 = r.d1 * t + r.value;
      r.value = r.value * t + coeffs_[k];
    }
    return r;
  }

  double operator()(double t) const { return eval2(t).value; }

  friend bool operator==(const FunctionSpec&, const FunctionSpec&) = default;

 private:
  std::vector<double> coeffs_;
};

inline double compose(const FunctionSpec& f, double t) { return f(t); }

inline Jet2 compose(const FunctionSpec& f, const Jet2& a) {
  const Taylor2 d = f.eval2(a.val);
  return chain(a, d.value, d.d1, d.d2);
}

inline void to_json(nlohmann::json& j, const FunctionSpec& f) { j = nlohmann::json{{"coeffs", f.coeffs()}}; }

inline void from_json(const nlohmann::json& j, FunctionSpec& f) {
  if (!j.is_object() || !j.contains("coeffs") || j.size() != 1)
    throw Error(ErrorKind::ConfigInvalid, "function spec must be {\"coeffs\":[...]}");
  const auto& c = j.at("coeffs");
  if (!c.is_array()) throw Error(ErrorKind::ConfigInvalid, "coeffs must be an array");
  std::vector<double> coeffs;
  for (const auto& v : c) {
    if (!v.is_number()) throw Error(ErrorKind::ConfigInvalid, "coeffs must be numbers");
    coeffs.push_back(v.get<double>());
  }
  f = FunctionSpec(std::move(coeffs));
}

}  // namespace rigidh
