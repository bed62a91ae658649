#include <gtest/gtest.h>

#include <random>

#include "rigidh/jet.hpp"

using rigidh::Jet2;

namespace {

std::array<Jet2, 6> seeds(const std::array<double, 6>& x) {
  std::array<Jet2, 6> v;
  for (std::size_t k = 0; k < 6; ++k) v[k] = Jet2::variable(k, x[k]);
  return v;
}

void expect_symmetric(const Jet2& j) {
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) EXPECT_EQ(j.hess[a][b], j.hess[b][a]);
}

}  // namespace

TEST(Jet, ConstantHasNoDerivatives) {
  const Jet2 c = Jet2::constant(3.5);
  EXPECT_EQ(c.val, 3.5);
  EXPECT_TRUE(c.is_constant());
  EXPECT_FALSE(Jet2::variable(2, 1.0).is_constant());
}

TEST(Jet, ProductOfTwoCoordinates) {
  const auto x = seeds({0.3, -1.2, 0.5, 0.0, 2.0, 1.0});
  const Jet2 p = x[0] * x[1];
  EXPECT_DOUBLE_EQ(p.val, -0.36);
  EXPECT_DOUBLE_EQ(p.grad[0], -1.2);
  EXPECT_DOUBLE_EQ(p.grad[1], 0.3);
  EXPECT_DOUBLE_EQ(p.hess[0][1], 1.0);
  EXPECT_DOUBLE_EQ(p.hess[0][0], 0.0);
  expect_symmetric(p);
}

TEST(Jet, QuotientMatchesHandDerivatives) {
  // f = x1 x2 / (1 + x3^2)
  const std::array<double, 6> at{0.7, -0.4, 1.3, 0.2, 0.1, 0.9};
  const auto x = seeds(at);
  const Jet2 f = x[0] * x[1] / (1.0 + x[2] * x[2]);
  const double a = at[0], b = at[1], c = at[2];
  const double q = 1.0 + c * c;
  EXPECT_NEAR(f.val, a * b / q, 1e-15);
  EXPECT_NEAR(f.grad[0], b / q, 1e-15);
  EXPECT_NEAR(f.grad[1], a / q, 1e-15);
  EXPECT_NEAR(f.grad[2], -2.0 * a * b * c / (q * q), 1e-15);
  EXPECT_NEAR(f.hess[0][1], 1.0 / q, 1e-15);
  EXPECT_NEAR(f.hess[0][2], -2.0 * b * c / (q * q), 1e-15);
  EXPECT_NEAR(f.hess[2][2], a * b * (6.0 * c * c - 2.0) / (q * q * q), 1e-14);
  EXPECT_EQ(f.grad[3], 0.0);
  expect_symmetric(f);
}

TEST(Jet, ChainRuleUsesAllThreeSlots) {
  const auto x = seeds({0.5, 2.0, 0, 0, 0, 0});
  const Jet2 u = x[0] * x[1];  // u = 1
  const Jet2 r = rigidh::chain(u, 10.0, 3.0, 7.0);
  EXPECT_EQ(r.val, 10.0);
  EXPECT_DOUBLE_EQ(r.grad[0], 3.0 * 2.0);
  EXPECT_DOUBLE_EQ(r.hess[0][0], 7.0 * 4.0);
  EXPECT_DOUBLE_EQ(r.hess[0][1], 3.0 * 1.0 + 7.0 * 2.0 * 0.5);
}

TEST(Jet, InverseGuardThrows) {
  try {
    (void)rigidh::inv(Jet2::constant(1e-13));
    FAIL();
  } catch (const rigidh::Error& e) {
    EXPECT_EQ(e.kind(), rigidh::ErrorKind::DivisionNearZero);
  }
  EXPECT_THROW((void)rigidh::inv(0.0), rigidh::Error);
  EXPECT_NO_THROW((void)rigidh::inv(Jet2::constant(1e-11)));
}

TEST(Jet, PowerAgreesWithRepeatedProduct) {
  const auto x = seeds({1.1, 0.4, 0, 0, 0, 0});
  const Jet2 s = x[0] + 2.0 * x[1];
  const Jet2 a = rigidh::ipow(s, 3);
  const Jet2 b = s * s * s;
  EXPECT_EQ(a.val, b.val);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a.grad[i], b.grad[i]);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(a.hess[i][j], b.hess[i][j]);
  }
  EXPECT_EQ(rigidh::ipow(s, 0).val, 1.0);
  EXPECT_EQ(rigidh::ipow(2.0, 5), 32.0);
}

TEST(Jet, RandomRationalAgainstCentralDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  auto f = [](const auto& x) { return (x[0] * x[3] - x[1]) / (x[2] * x[2] + x[4]) + x[5] * x[5] * x[0]; };
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, 6> at;
    for (auto& v : at) v = u(rng);
    const Jet2 j = f(seeds(at));
    const double h = 1e-4;
    for (std::size_t k = 0; k < 6; ++k) {
      auto p = at, m = at;
      p[k] += h;
      m[k] -= h;
      EXPECT_NEAR(j.grad[k], (f(p) - f(m)) / (2 * h), 1e-6);
      for (std::size_t l = 0; l < 6; ++l) {
        auto pp = at, pm = at, mp = at, mm = at;
        pp[k] += h, pp[l] += h;
        pm[k] += h, pm[l] -= h;
        mp[k] -= h, mp[l] += h;
        mm[k] -= h, mm[l] -= h;
        EXPECT_NEAR(j.hess[k][l], (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h), 1e-4);
      }
    }
  }
}
