#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rigidh/rigidh.hpp"

namespace testing_support {

inline std::string fixture_path(const std::string& name) { return std::string(RIGIDH_FIXTURES_DIR) + "/" + name + ".json"; }

inline rigidh::FamilyConfig load_fixture(const std::string& name,
                                         rigidh::MisprintMode mode = rigidh::MisprintMode::Literal) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  nlohmann::json j;
  in >> j;
  rigidh::FamilyConfig c = rigidh::parse_config(j);
  c.misprints = mode;
  return c;
}

/// Box keeping the generic [2211] roots x2, x4 + 1/2, x5, x6^2 well apart.
inline rigidh::Box generic_2211_box() {
  return {{{0.1, 0.9}, {0.1, 0.3}, {0.1, 0.9}, {0.1, 0.3}, {1.0, 1.2}, {1.2, 1.3}}};
}

inline rigidh::Box box_for(const std::string& fixture) {
  return fixture == "f2211_generic" ? generic_2211_box()
                                    : rigidh::default_box(load_fixture(fixture).family);
}

inline const std::vector<std::string>& all_fixtures() {
  static const std::vector<std::string> names = {
      "f2211_flat", "f2211_generic", "f2211_eps1", "f2211_eps1_flat", "f2211_f5", "f321_flat", "f321_f6",
      "f321_generic", "f33_flat", "f33_eps1", "f33_generic", "f411_flat", "f411_f5", "f411_eps1",
      "f411_generic", "f51_flat", "f51_eps1", "f51_f6"};
  return names;
}

inline rigidh::ChartPoint point(std::array<double, 6> x) { return rigidh::ChartPoint{x}; }

}  // namespace testing_support
