#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "randfeat/activation.hpp"
#include "randfeat/errors.hpp"

using namespace randfeat;

TEST(Activation, ReluAndSwishValues) {
  const auto relu = Activation::relu();
  EXPECT_EQ(relu(0.5), 0.5);
  EXPECT_EQ(relu(-0.5), 0.0);
  EXPECT_EQ(relu.bound_c(), 1.0);
  EXPECT_EQ(relu.lipschitz_l(), 1.0);

  const auto swish = Activation::swish();
  EXPECT_DOUBLE_EQ(swish(1.0), 1.0 / (1.0 + std::exp(-1.0)));
  EXPECT_DOUBLE_EQ(swish(-1.0), -1.0 / (1.0 + std::exp(1.0)));
  EXPECT_DOUBLE_EQ(swish.bound_c(), swish(1.0));
  // swish'(z) = s + z s (1 - s) peaks at z = 1 on [-1, 1]
  const double s = 1.0 / (1.0 + std::exp(-1.0));
  EXPECT_NEAR(swish.lipschitz_l(), s + s * (1.0 - s), 1e-4);
}

TEST(Activation, WendlandZeroHandValues) {
  // d = 3: l = 2; r = sqrt(2 - 2z) / sqrt(2) = sqrt(1 - z)
  const auto w = Activation::wendland0(3);
  EXPECT_EQ(w.wendland_exponent(), 2);
  EXPECT_DOUBLE_EQ(w(1.0), 1.0);
  EXPECT_NEAR(w(0.0), 0.0, 1e-15);
  EXPECT_EQ(w(-0.5), 0.0);
  const double r = std::sqrt(0.5);
  EXPECT_NEAR(w(0.5), (1 - r) * (1 - r), 1e-15);
  EXPECT_EQ(Activation::wendland0(10).wendland_exponent(), 6);
}

TEST(Activation, WendlandTwoHandValues) {
  // d = 3: l = 4; (1-r)^6 (35 r^2 + 18 r + 3)
  const auto w = Activation::wendland2(3);
  EXPECT_EQ(w.wendland_exponent(), 4);
  EXPECT_DOUBLE_EQ(w(1.0), 3.0);
  const double r = std::sqrt(1.0 - 0.75);
  EXPECT_NEAR(w(0.75), std::pow(1 - r, 6) * (35 * r * r + 18 * r + 3), 1e-14);
  EXPECT_DOUBLE_EQ(w.bound_c(), 3.0);
}

TEST(Activation, WendlandZetaShrinksSupport) {
  const auto w = Activation::wendland0(5, 0.5);
  // support: sqrt(2 - 2z) <= 0.5  <=>  z >= 0.875
  EXPECT_EQ(w(0.87), 0.0);
  EXPECT_GT(w(0.9), 0.0);
}

TEST(Activation, DomainTolerance) {
  const auto relu = Activation::relu();
  EXPECT_EQ(relu(1.0 + 1e-13), 1.0);
  EXPECT_THROW(relu(1.0 + 1e-9), DomainError);
  EXPECT_THROW(relu(-1.5), DomainError);
  EXPECT_EQ(relu.eval_raw(3.0), 3.0);
}

TEST(Activation, EvalRawOutsideSphere) {
  const auto w = Activation::wendland0(3);
  EXPECT_DOUBLE_EQ(w.eval_raw(2.0), 1.0);
  EXPECT_EQ(w.eval_raw(-3.0), 0.0);
}

TEST(Activation, Scaling) {
  const auto relu = Activation::relu().scaled(2.5);
  EXPECT_EQ(relu(0.4), 1.0);
  EXPECT_EQ(relu.bound_c(), 2.5);
  EXPECT_EQ(relu.lipschitz_l(), 2.5);
  EXPECT_THROW(Activation::relu().scaled(0.0), DomainError);
  EXPECT_THROW(Activation::relu().scaled(-1.0), DomainError);
}

TEST(Activation, InvalidConstruction) {
  EXPECT_THROW(Activation::wendland0(2), DomainError);
  EXPECT_THROW(Activation::wendland2(5, 0.0), DomainError);
  EXPECT_THROW(Activation::parse("tanh", 3), ConfigError);
  EXPECT_THROW(Activation::parse("relu:zeta=1", 3), ConfigError);
  EXPECT_THROW(Activation::parse("wendland0:zeta=abc", 3), ConfigError);
}

std::vector<double> unit_grid(std::size_t n) {
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  z.back() = 1.0;
  return z;
}

TEST(Activation, TabulatedInterpolation) {
  const auto z = unit_grid(257);
  std::vector<double> g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) g[i] = z[i] * z[i];
  const auto act = Activation::tabulated(z, g);
  EXPECT_DOUBLE_EQ(act(z[10]), g[10]);
  const double mid = 0.5 * (z[10] + z[11]);
  EXPECT_NEAR(act(mid), 0.5 * (g[10] + g[11]), 1e-15);
  EXPECT_DOUBLE_EQ(act.bound_c(), 1.0);
  EXPECT_NEAR(act.lipschitz_l(), (g[256] - g[255]) / (z[256] - z[255]), 1e-12);
}

TEST(Activation, TabulatedValidation) {
  EXPECT_THROW(Activation::tabulated(unit_grid(100), std::vector<double>(100, 1.0)), ConfigError);
  auto z = unit_grid(300);
  z[5] = z[4];
  EXPECT_THROW(Activation::tabulated(z, std::vector<double>(300, 1.0)), ConfigError);
  auto shifted = unit_grid(300);
  shifted.front() = -0.9;
  EXPECT_THROW(Activation::tabulated(shifted, std::vector<double>(300, 1.0)), ConfigError);
}

TEST(Activation, TabulatedFromCsvAndSpecRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "randfeat_tab_act.csv";
  {
    std::ofstream out(path);
    out << "z,gamma\n";
    for (double z : unit_grid(256)) out << z << ',' << 2.0 << '\n';
  }
  const auto act = Activation::parse("tabulated:" + path.string(), 3);
  EXPECT_EQ(act.kind(), ActivationKind::Tabulated);
  EXPECT_EQ(act(0.3), 2.0);
  EXPECT_EQ(Activation::parse(act.spec(), 3)(0.1), 2.0);
  std::filesystem::remove(path);
}

TEST(Activation, ParseSpecs) {
  EXPECT_EQ(Activation::parse("relu", 3).kind(), ActivationKind::ReLU);
  const auto w = Activation::parse("wendland2:zeta=1.25", 7);
  EXPECT_EQ(w.kind(), ActivationKind::Wendland2);
  EXPECT_EQ(w.zeta(), 1.25);
  EXPECT_EQ(w.dimension(), 7);
  EXPECT_EQ(Activation::parse(w.spec(), 7).zeta(), 1.25);
  EXPECT_EQ(Activation::parse("wendland0", 4).spec(), "wendland0");
}
