#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "randfeat/errors.hpp"
#include "randfeat/gegenbauer.hpp"

using namespace randfeat;

namespace {

// int_{-1}^{1} t^{2j} (1 - t^2)^{tau - 1/2} dt = Gamma(j + 1/2) Gamma(tau + 1/2) / Gamma(j + tau + 1)
double even_moment(int j, double tau) {
  return std::exp(std::lgamma(j + 0.5) + std::lgamma(tau + 0.5) - std::lgamma(j + tau + 1.0));
}

}  // namespace

TEST(Gegenbauer, LowDegreeClosedForms) {
  for (double tau : {0.5, 1.0, 4.0}) {
    for (double t : {-0.9, -0.2, 0.0, 0.35, 1.0}) {
      EXPECT_DOUBLE_EQ(gegenbauer(0, tau, t), 1.0);
      EXPECT_DOUBLE_EQ(gegenbauer(1, tau, t), 2.0 * tau * t);
      EXPECT_NEAR(gegenbauer(2, tau, t), 2.0 * tau * (tau + 1.0) * t * t - tau, 1e-14);
    }
  }
}

TEST(Gegenbauer, LegendreAtHalf) {
  for (double t : {-0.7, 0.1, 0.8}) {
    EXPECT_NEAR(gegenbauer(3, 0.5, t), 0.5 * (5 * t * t * t - 3 * t), 1e-15);
    EXPECT_NEAR(gegenbauer(4, 0.5, t), (35 * std::pow(t, 4) - 30 * t * t + 3) / 8.0, 1e-15);
  }
}

TEST(Gegenbauer, ValueAtOne) {
  for (double tau : {0.5, 1.5, 4.0}) {
    for (int k : {0, 1, 5, 20}) {
      const double rec = gegenbauer(k, tau, 1.0);
      EXPECT_NEAR(gegenbauer_at_one(k, tau) / rec, 1.0, 1e-12) << "k=" << k << " tau=" << tau;
    }
  }
}

TEST(Gegenbauer, RecurrenceFillMatchesSingle) {
  std::vector<double> out(12);
  gegenbauer_values(2.5, 0.3, out);
  for (int k = 0; k < 12; ++k) EXPECT_DOUBLE_EQ(out[k], gegenbauer(k, 2.5, 0.3));
}

TEST(GaussGegenbauer, MomentsAreExact) {
  for (double tau : {0.5, 1.5, 4.0}) {
    const int n = 64;
    const auto rule = gauss_gegenbauer(n, tau);
    ASSERT_EQ(rule.nodes.size(), static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += rule.weights[i] * std::pow(rule.nodes[i], 2 * j);
      EXPECT_NEAR(q / even_moment(j, tau), 1.0, 1e-11) << "tau=" << tau << " j=" << j;
    }
  }
}

TEST(GaussGegenbauer, LargeRuleStructure) {
  const auto rule = gauss_gegenbauer(1024, 4.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i];
    EXPECT_GT(rule.weights[i], 0.0);
    if (i > 0) {
      EXPECT_GT(rule.nodes[i], rule.nodes[i - 1]);
    }
    EXPECT_NEAR(rule.nodes[i], -rule.nodes[rule.nodes.size() - 1 - i], 1e-15);
  }
  EXPECT_NEAR(sum / even_moment(0, 4.0), 1.0, 1e-12);
  double m2 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) m2 += rule.weights[i] * std::pow(rule.nodes[i], 40);
  EXPECT_NEAR(m2 / even_moment(20, 4.0), 1.0, 1e-10);
}

TEST(GaussGegenbauer, NormsMatchQuadrature) {
  for (double tau : {0.5, 4.0}) {
    const auto rule = gauss_gegenbauer(200, tau);
    for (int k : {0, 1, 7, 50}) {
      double h = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double c = gegenbauer(k, tau, rule.nodes[i]);
        h += rule.weights[i] * c * c;
      }
      EXPECT_NEAR(std::log(h), log_gegenbauer_norm(k, tau), 1e-10);
    }
  }
}

TEST(GaussGegenbauer, OddNodeCountHasZeroNode) {
  const auto rule = gauss_gegenbauer(5, 1.0);
  EXPECT_EQ(rule.nodes[2], 0.0);
}
