#include <gtest/gtest.h>

#include "fd_oracle.hpp"
#include "fixtures.hpp"
#include "rigidh/metric.hpp"

using namespace rigidh;
using testing_support::load_fixture;
using testing_support::point;

namespace {

struct Entry {
  int i, j;
  double v;
};

// Reference values from an independent symbolic construction of the
// canonical metrics (upper triangle, nonzero entries only).
struct FrozenMetric {
  const char* fixture;
  MisprintMode mode;
  std::array<double, 6> x;
  std::vector<Entry> entries;
};

const std::vector<FrozenMetric>& frozen_metrics() {
  static const std::vector<FrozenMetric> v = {
      {"f2211_generic", MisprintMode::Literal, {0.3, 0.2, 0.4, 0.2, 1.1, 1.25},
       {{1, 2, 0.10423125}, {2, 2, -0.20714074999999998}, {3, 4, -0.051750000000000025},
        {4, 4, -0.010575000000000041}, {5, 5, -0.05994000000000005}, {6, 6, -0.6387088980102539}}},
      {"f321_generic", MisprintMode::Literal, {0.2, 0.3, 0.4, 0.5, 1.5, 0.6},
       {{1, 3, 22.126592000000002}, {2, 2, 7.577600000000001}, {2, 3, -33.617920000000005},
        {3, 3, 38.77235199999999}, {4, 5, 16.711680000000005}, {5, 5, 57.13920000000001},
        {6, 6, -4.652587417599998}}},
      {"f321_generic", MisprintMode::Alt, {0.2, 0.3, 0.4, 0.5, 1.5, 0.6},
       {{1, 3, 22.126592000000002}, {2, 2, 7.577600000000001}, {2, 3, -33.617920000000005},
        {3, 3, 38.77235199999999}, {4, 5, 16.711680000000005}, {5, 5, 57.13920000000001},
        {6, 6, -47.96814786559999}}},
      {"f33_generic", MisprintMode::Literal, {0.2, 0.3, 0.4, 0.5, 0.6, 1.5},
       {{1, 3, -27.04212}, {2, 2, -9.261000000000001}, {2, 3, 36.779399999999995}, {3, 3, -38.63411999999999},
        {4, 6, -55.566}, {5, 5, -9.261000000000001}, {5, 6, -84.01050000000001}, {6, 6, -308.49525000000006}}},
      {"f33_generic", MisprintMode::Alt, {0.2, 0.3, 0.4, 0.5, 0.6, 1.5},
       {{1, 3, -27.04212}, {2, 2, -9.261000000000001}, {2, 3, 36.779399999999995}, {3, 3, -38.63411999999999},
        {4, 6, -57.418200000000006}, {5, 5, -9.261000000000001}, {5, 6, -86.65650000000001},
        {6, 6, -326.5132500000001}}},
      {"f411_generic", MisprintMode::Literal, {0.2, 0.3, 0.4, 0.5, 0.6, 0.7},
       {{1, 4, 31.08105}, {2, 3, 6.279}, {2, 4, -21.4281}, {3, 3, -5.09}, {3, 4, 0.6768000000000005},
        {4, 4, -0.798840000000002}, {5, 5, -17.308809}, {6, 6, -71.13359532889997}}},
      {"f51_frozen", MisprintMode::Literal, {0.2, 0.3, 0.4, 0.5, 0.6, 0.7},
       {{1, 5, 17.64}, {2, 4, 2.1}, {2, 5, -5.88}, {3, 3, 2.1}, {3, 4, -1.0}, {3, 5, 0.05999999999999979},
        {4, 5, -0.17999999999999994}, {5, 5, -3.036}, {6, 6, 40.84101000000001}}},
  };
  return v;
}

FamilyConfig frozen_config(const FrozenMetric& f) {
  if (std::string(f.fixture) == "f51_frozen") {
    FamilyConfig c = load_fixture("f51_eps1", f.mode);
    c.theta = FunctionSpec({1.0, 1.0});
    c.f6 = FunctionSpec({2.0, 1.0});
    return c;
  }
  return load_fixture(f.fixture, f.mode);
}

const char* kGeneric[] = {"f2211_generic", "f321_generic", "f33_generic", "f411_generic", "f51_f6", "f51_eps1"};

FamilyConfig g12_example(int e2) {
  FamilyConfig c = load_fixture("f2211_flat");
  c.e[2] = e2;
  return c;
}

}  // namespace

TEST(Metric, FrozenValuesFromSymbolicReference) {
  for (const auto& f : frozen_metrics()) {
    const Matrix6 g = metric_values(frozen_config(f), point(f.x));
    Matrix6 expected{};
    for (const auto& e : f.entries) {
      expected[static_cast<std::size_t>(e.i - 1)][static_cast<std::size_t>(e.j - 1)] = e.v;
      expected[static_cast<std::size_t>(e.j - 1)][static_cast<std::size_t>(e.i - 1)] = e.v;
    }
    const double scale = max_abs(expected);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        EXPECT_NEAR(g[i][j], expected[i][j], 1e-13 * scale) << f.fixture << " g" << i + 1 << j + 1;
  }
}

TEST(Metric, G12HandExample) {
  for (int e2 : {1, -1}) {
    const Matrix6 g = metric_values(g12_example(e2), point({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}));
    EXPECT_DOUBLE_EQ(g[0][1], 6.0 * e2);
    EXPECT_DOUBLE_EQ(g[1][0], 6.0 * e2);
    EXPECT_EQ(g[0][0], 0.0);
  }
}

TEST(Metric, ExactSymmetryInAllSlots) {
  for (const char* name : kGeneric) {
    const FamilyConfig c = load_fixture(name);
    for (const auto& p : sample_points(c, 5, 3, testing_support::box_for(name))) {
      const MetricJet m = eval_metric(c, p);
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
          EXPECT_EQ(m.g[i][j].val, m.g[j][i].val);
          EXPECT_EQ(m.g[i][j].grad, m.g[j][i].grad);
          EXPECT_EQ(m.g[i][j].hess, m.g[j][i].hess);
        }
    }
  }
}

TEST(Metric, DerivativeSlotsMatchFiniteDifferences) {
  for (const char* name : kGeneric) {
    for (MisprintMode mode : {MisprintMode::Literal, MisprintMode::Alt}) {
      const FamilyConfig c = load_fixture(name, mode);
      for (const auto& p : sample_points(c, 20, 17, testing_support::box_for(name))) {
        const MetricJet m = eval_metric(c, p);
        const auto fd = fd_oracle::metric_derivatives(c, p);
        double s1 = 0, s2 = 0, e1 = 0, e2 = 0;
        for (std::size_t k = 0; k < 6; ++k)
          for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) {
              const int ii = static_cast<int>(i), jj = static_cast<int>(j);
              s1 = std::max(s1, std::abs(fd.d[k](ii, jj)));
              e1 = std::max(e1, std::abs(m.g[i][j].grad[k] - fd.d[k](ii, jj)));
              for (std::size_t l = 0; l < 6; ++l) {
                s2 = std::max(s2, std::abs(fd.dd[k][l](ii, jj)));
                e2 = std::max(e2, std::abs(m.g[i][j].hess[k][l] - fd.dd[k][l](ii, jj)));
              }
            }
        EXPECT_LE(e1, 1e-6 * std::max(s1, 1e-300)) << name;
        EXPECT_LE(e2, 1e-6 * std::max(s2, 1e-300)) << name;
      }
    }
  }
}

TEST(Metric, EvalRejectsInvalidConfigAndSingularPoint) {
  FamilyConfig c = load_fixture("f2211_flat");
  c.eps = 2;
  try {
    (void)eval_metric(c, point({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
  }
  const FamilyConfig g = load_fixture("f2211_generic");
  try {
    (void)eval_metric(g, point({0.3, 0.5, 0.4, 0.2, 0.5, 1.25}));  // f2 = f5
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularPoint);
  }
}

TEST(MetricInverse, DiagonalAndOffDiagonalBlock) {
  MetricJet m;
  const std::array<double, 6> d{2.0, -4.0, 0.5, 1.0, -1.0, 8.0};
  for (std::size_t i = 0; i < 6; ++i) m.g[i][i] = Jet2::constant(d[i]);
  m.g[0][0] = Jet2::variable(0, 2.0);  // g11 = x1 at x1 = 2
  const MetricJet inv = metric_inverse(m);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(inv.g[i][i].val, 1.0 / d[i]);
  EXPECT_DOUBLE_EQ(inv.g[0][0].grad[0], -0.25);
  EXPECT_DOUBLE_EQ(inv.g[0][0].hess[0][0], 0.25);

  MetricJet b;
  b.g[0][1] = b.g[1][0] = Jet2::constant(3.0);
  for (std::size_t i = 2; i < 6; ++i) b.g[i][i] = Jet2::constant(1.0);
  const MetricJet bi = metric_inverse(b);
  EXPECT_DOUBLE_EQ(bi.g[0][1].val, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(bi.g[1][0].val, 1.0 / 3.0);
  EXPECT_EQ(bi.g[0][0].val, 0.0);
  EXPECT_EQ(bi.g[1][1].val, 0.0);
}

TEST(MetricInverse, ProductIsIdentityThroughSecondOrder) {
  for (const char* name : kGeneric) {
    const FamilyConfig c = load_fixture(name);
    for (const auto& p : sample_points(c, 5, 9, testing_support::box_for(name))) {
      const MetricJet m = eval_metric(c, p);
      const MetricJet mi = metric_inverse(m);
      double gscale = 0;
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
          gscale = std::max({gscale, std::abs(m.g[i][j].val) * std::abs(mi.g[i][j].val)});
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
          Jet2 s;
          for (std::size_t k = 0; k < 6; ++k) s += m.g[i][k] * mi.g[k][j];
          EXPECT_NEAR(s.val, i == j ? 1.0 : 0.0, 1e-12 * std::max(1.0, gscale)) << name;
          for (std::size_t a = 0; a < 6; ++a) {
            EXPECT_NEAR(s.grad[a], 0.0, 1e-10 * std::max(1.0, gscale)) << name;
            for (std::size_t b = 0; b < 6; ++b) EXPECT_NEAR(s.hess[a][b], 0.0, 1e-10 * std::max(1.0, gscale)) << name;
          }
        }
    }
  }
}

TEST(MetricInverse, SingularThrows) {
  MetricJet m;
  for (std::size_t i = 0; i < 5; ++i) m.g[i][i] = Jet2::constant(1.0);
  try {
    (void)metric_inverse(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NearSingularMetric);
  }
}

TEST(Signature, DiagonalPattern) {
  Matrix6 g{};
  const std::array<double, 6> d{1, 1, -1, -1, -1, -1};
  for (std::size_t i = 0; i < 6; ++i) g[i][i] = d[i];
  const Signature s = signature(g);
  EXPECT_EQ(s.n_plus, 2);
  EXPECT_EQ(s.n_minus, 4);
  EXPECT_EQ(s.eigenvalues[0], 1.0);
  EXPECT_EQ(s.eigenvalues[5], -1.0);
}

TEST(Signature, GoldenFixturesAreTwoFour) {
  for (const char* name : {"f2211_generic", "f2211_flat"}) {
    const FamilyConfig c = load_fixture(name);
    for (const auto& p : sample_points(c, 50, 1, testing_support::box_for(name))) {
      const Signature s = signature(eval_metric(c, p));
      EXPECT_EQ(s.n_plus, 2) << name;
      EXPECT_EQ(s.n_minus, 4) << name;
    }
  }
}

TEST(Signature, SignScanFindsExactlyTheFrozenAssignments) {
  const FamilyConfig base = load_fixture("f2211_generic");
  const auto pts = sample_points(base, 20, 1, testing_support::generic_2211_box());
  int admissible = 0;
  for (int mask = 0; mask < 16; ++mask) {
    FamilyConfig c = base;
    const int ks[] = {2, 4, 5, 6};
    for (int b = 0; b < 4; ++b) c.e[static_cast<std::size_t>(ks[b])] = (mask >> b & 1) ? -1 : 1;
    bool all = true;
    for (const auto& p : pts) all = all && signature(metric_values(c, p)).n_plus == 2;
    if (all) {
      ++admissible;
      EXPECT_EQ(c.sign(5), -1);
      EXPECT_EQ(c.sign(6), 1);
    }
  }
  EXPECT_EQ(admissible, 4);
}

TEST(Signature, DegenerateMetricThrows) {
  const FamilyConfig c = load_fixture("f2211_generic");
  try {
    (void)signature(metric_values(c, point({0.3, 0.2, 0.4, 0.2, 0.2 + 1e-9, 1.25})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NearSingularMetric);
  }
}

TEST(SingularDistance, Examples) {
  const FamilyConfig flat = load_fixture("f2211_flat");
  EXPECT_LE(singular_distance(flat, point({0.1, 0.2, 0.3, 0.4, 0.5, 0.6})), 1.0);
  EXPECT_GT(singular_distance(flat, point({0.1, 0.2, 0.3, 0.4, 0.5, 0.6})), 0.0);
  const FamilyConfig g = load_fixture("f2211_generic");
  EXPECT_EQ(singular_distance(g, point({0.3, 0.5, 0.4, 0.2, 0.5, 1.25})), 0.0);
}

TEST(Sampler, DeterministicAndAboveThreshold) {
  for (const auto& name : testing_support::all_fixtures()) {
    const FamilyConfig c = load_fixture(name);
    const Box box = testing_support::box_for(name);
    const auto a = sample_points(c, 25, 42, box);
    const auto b = sample_points(c, 25, 42, box);
    EXPECT_EQ(a, b) << name;
    EXPECT_NE(a, sample_points(c, 25, 43, box)) << name;
    for (const auto& p : a) {
      EXPECT_GE(singular_distance(c, p), kMinSingularDistance) << name;
      for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_GE(p.x[k], box[k].lo);
        EXPECT_LE(p.x[k], box[k].hi);
      }
    }
  }
}

TEST(Sampler, PreconditionsAndExhaustion) {
  const FamilyConfig c = load_fixture("f2211_generic");
  const Box box = testing_support::generic_2211_box();
  for (int n : {0, -3}) {
    try {
      (void)sample_points(c, n, 1, box);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::PreconditionViolation);
    }
  }
  Box bad = box;
  bad[1] = {0.5, 0.5};
  bad[4] = {0.5, 0.5};
  try {
    (void)sample_points(c, 2, 1, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SamplingExhausted);
  }
}

TEST(FamilyConfig, ParseAndEcho) {
  for (const auto& name : testing_support::all_fixtures()) {
    std::ifstream in(testing_support::fixture_path(name));
    nlohmann::json j;
    in >> j;
    const FamilyConfig c = parse_config(j);
    const nlohmann::json echo = c;
    EXPECT_EQ(parse_config(echo).family, c.family);
    EXPECT_EQ(nlohmann::json(parse_config(echo)), echo) << name;
  }
}

TEST(FamilyConfig, RejectsInvalid) {
  auto base = [] {
    std::ifstream in(testing_support::fixture_path("f2211_flat"));
    nlohmann::json j;
    in >> j;
    return j;
  };
  auto expect_invalid = [](const nlohmann::json& j) {
    try {
      (void)parse_config(j);
      ADD_FAILURE() << j.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid) << j.dump();
    }
  };
  auto j = base();
  j["eps"] = 2;
  expect_invalid(j);
  j = base();
  j["a"] = 0.0;
  expect_invalid(j);
  j = base();
  j["signs"]["e5"] = 3;
  expect_invalid(j);
  j = base();
  j["signs"].erase("e6");
  expect_invalid(j);
  j = base();
  j["signs"]["e1"] = 1;
  expect_invalid(j);
  j = base();
  j["colour"] = "red";
  expect_invalid(j);
  j = base();
  j.erase("f5");
  expect_invalid(j);
  j = base();
  j["family"] = "222";
  expect_invalid(j);

  std::ifstream in(testing_support::fixture_path("f411_flat"));
  nlohmann::json k;
  in >> k;
  k["omega"] = {{"coeffs", {1.0}}};
  expect_invalid(k);
}

TEST(FamilyConfig, FamilySpecificRules) {
  std::ifstream in(testing_support::fixture_path("f321_flat"));
  nlohmann::json j;
  in >> j;
  EXPECT_NO_THROW((void)parse_config(j));
  j.erase("validation");
  EXPECT_THROW((void)parse_config(j), Error);
  j["eps"] = 1;
  EXPECT_NO_THROW((void)parse_config(j));

  std::ifstream in33(testing_support::fixture_path("f33_flat"));
  nlohmann::json k;
  in33 >> k;
  k["theta"] = {{"coeffs", {0.0}}};
  EXPECT_THROW((void)parse_config(k), Error);
  k["eps"] = 1;
  EXPECT_NO_THROW((void)parse_config(k));
}
