#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "randfeat/activation.hpp"
#include "randfeat/data.hpp"
#include "randfeat/errors.hpp"
#include "randfeat/harmonics.hpp"
#include "randfeat/rng.hpp"

using namespace randfeat;

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// E_w[f(x^T w) g(y^T w)] for w uniform on S^{d-1}, with x^T y = t.
template <class F, class G>
double monte_carlo_kernel(double t, int d, int samples, std::uint64_t seed, F&& f, G&& g) {
  GaussianStream rng(seed);
  const double s = std::sqrt(1.0 - t * t);
  double sum = 0.0;
  std::vector<double> w(static_cast<std::size_t>(d));
  for (int i = 0; i < samples; ++i) {
    rng.fill(w);
    double norm = 0.0;
    for (double v : w) norm += v * v;
    norm = std::sqrt(norm);
    const double a = w[0] / norm;
    const double b = (t * w[0] + s * w[1]) / norm;
    sum += f(a) * g(b);
  }
  return sum / samples;
}

}  // namespace

TEST(HarmonicDimension, MatchesBinomialCounts) {
  for (int d : {3, 4, 7, 10}) {
    EXPECT_NEAR(std::exp(log_harmonic_dimension(0, d)), 1.0, 1e-12);
    EXPECT_NEAR(std::exp(log_harmonic_dimension(1, d)), d, 1e-12 * d);
    for (int k = 2; k < 30; ++k) {
      const double b = binomial(d + k - 1, k) - binomial(d + k - 3, k - 2);
      EXPECT_NEAR(std::exp(log_harmonic_dimension(k, d)) / b, 1.0, 1e-12) << "k=" << k << " d=" << d;
    }
  }
  EXPECT_NEAR(std::exp(log_harmonic_dimension(5, 3)), 11.0, 1e-11);
  EXPECT_NEAR(std::exp(log_harmonic_dimension(5, 4)), 36.0, 1e-11);
}

TEST(Expansion, CubicInLegendreBasis) {
  const auto e = expand_function([](double t) { return t * t * t; }, 3, 16);
  EXPECT_NEAR(e.coeffs_a[1], 0.6, 1e-14);
  EXPECT_NEAR(e.coeffs_a[3], 0.4, 1e-14);
  for (int k : {0, 2, 4, 5, 9, 16}) EXPECT_NEAR(e.coeffs_a[k], 0.0, 1e-14) << k;
  EXPECT_LT(e.reconstruction_error, 1e-13);
  EXPECT_NEAR(e.evaluate(0.3), 0.027, 1e-14);
  EXPECT_GE(e.quadrature_nodes, kMinQuadratureNodes);
}

TEST(Expansion, LinearInHigherDimension) {
  // C_1^{(tau)}(t) = 2 tau t, tau = 3/2 for d = 5
  const auto e = expand_function([](double t) { return t; }, 5, 16);
  EXPECT_NEAR(e.coeffs_a[1], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(e.relative_mode_norm[1], 1.0, 1e-12);
  EXPECT_NEAR(e.relative_mode_norm[0], 0.0, 1e-14);
}

TEST(Expansion, RejectsBadConfiguration) {
  const auto relu = Activation::relu();
  EXPECT_THROW(expand(relu, 3, 8), ConfigError);
  EXPECT_THROW(expand(relu, 3, 600, 1000), ConfigError);
  EXPECT_THROW(expand(relu, 2, 32), DomainError);
  EXPECT_THROW(expand(Activation::wendland0(5), 3, 32), ConfigError);
}

TEST(Expansion, SmoothActivationReconstructs) {
  const auto e = expand(Activation::swish(), 4, 64);
  EXPECT_FALSE(e.reconstruction_warning());
  EXPECT_NEAR(e.evaluate(0.37), Activation::swish()(0.37), 1e-12);
}

TEST(FunkHecke, LinearActivationGivesScaledInnerProduct) {
  for (int d : {3, 6, 10}) {
    const auto k = funk_hecke(expand_function([](double t) { return t; }, d, 16));
    for (double t : {-0.8, 0.0, 0.45, 1.0}) EXPECT_NEAR(k.evaluate(t), t / d, 1e-14) << d;
  }
}

TEST(FunkHecke, ConstantActivationGivesConstantKernel) {
  const auto k = funk_hecke(expand_function([](double) { return 1.0; }, 7, 16));
  for (double t : {-1.0, 0.2, 1.0}) EXPECT_NEAR(k.evaluate(t), 1.0, 1e-14);
}

TEST(FunkHecke, QuadraticActivationMatchesMonteCarlo) {
  // E[(x.w)^2 (y.w)^2] = (1 + 2 t^2) / (d (d + 2))
  const int d = 4;
  const auto k = funk_hecke(expand_function([](double t) { return t * t; }, d, 16));
  for (double t : {-0.5, 0.0, 0.9}) EXPECT_NEAR(k.evaluate(t), (1.0 + 2.0 * t * t) / (d * (d + 2.0)), 1e-14);
}

TEST(ReluKernel, ClosedFormMatchesMonteCarlo) {
  const auto relu = [](double z) { return z > 0.0 ? z : 0.0; };
  for (int d : {3, 10}) {
    for (double t : {-0.6, 0.0, 0.7}) {
      const double mc = monte_carlo_kernel(t, d, 400000, 77 + d, relu, relu);
      EXPECT_NEAR(relu_phi(t, d), mc, 4.0 / (d * std::sqrt(400000.0))) << "d=" << d << " t=" << t;
    }
  }
  EXPECT_NEAR(relu_phi(1.0, 5), 0.1, 1e-15);
  EXPECT_NEAR(relu_phi(-1.0, 5), 0.0, 1e-15);
}

TEST(ReluKernel, ExpansionAgreesWithClosedForm) {
  const int d = 6;
  const auto k = funk_hecke(expand(Activation::relu(), d, 500));
  for (double t : {-0.9, -0.3, 0.1, 0.5, 0.95}) EXPECT_NEAR(k.evaluate(t), relu_phi(t, d), 1e-6);
}

TEST(NtkKernel, ClosedFormIsArcCosineZero) {
  const auto step = [](double z) { return z > 0.0 ? 1.0 : 0.0; };
  for (double t : {-0.5, 0.3}) {
    const double mc = monte_carlo_kernel(t, 3, 400000, 5, step, step);
    EXPECT_NEAR(ntk_phi(t, 3) * 3.0, t * mc, 5e-3);
  }
  EXPECT_THROW(ntk_phi(0.2, 2), DomainError);
}

TEST(PopulationKernel, ClosedFormsAndDomain) {
  const auto relu = PopulationKernel::closed_form(ClosedFormKernel::ReLU, 4);
  EXPECT_DOUBLE_EQ(relu(0.25), relu_phi(0.25, 4));
  const auto ntk = PopulationKernel::closed_form(ClosedFormKernel::NTK, 4);
  EXPECT_DOUBLE_EQ(ntk(-0.25), ntk_phi(-0.25, 4));
  EXPECT_THROW(relu(1.5), DomainError);
}

TEST(PopulationKernel, MatrixIsSymmetricPositiveSemidefinite) {
  const auto data = uniform_sphere(40, 3, 91);
  const auto relu = population_kernel_matrix(data.points, PopulationKernel::closed_form(ClosedFormKernel::ReLU, 3));
  EXPECT_EQ(relu, relu.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(relu);
  EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-12);

  const auto wend = funk_hecke(expand(Activation::wendland0(3), 3, 256));
  const auto h = population_kernel_matrix(data.points, PopulationKernel::from_expansion(wend));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_w(h);
  EXPECT_GT(eig_w.eigenvalues().minCoeff(), 1e-12 * eig_w.eigenvalues().maxCoeff());

  EXPECT_THROW(population_kernel_matrix(data.points, PopulationKernel::closed_form(ClosedFormKernel::ReLU, 4)),
               ConfigError);
}

TEST(PopulationKernel, ReluSingularOnBadSet) {
  const auto bad = bad_point_set(3);
  const auto h = population_kernel_matrix(bad.points, PopulationKernel::closed_form(ClosedFormKernel::ReLU, 3));
  EXPECT_LT((h * bad_set_null_vector()).norm(), 1e-15);
}

TEST(Certify, PolynomialsAreFlagged) {
  const auto cubic = certify(expand_function([](double t) { return t * t * t; }, 3, 64));
  EXPECT_EQ(cubic.status, PdStatus::BothPartsPolynomial);
  EXPECT_EQ(cubic.odd_count_above_tol, 2);
  EXPECT_EQ(cubic.even_count_above_tol, 0);

  const auto mixed = certify(expand_function([](double t) { return 1.0 / (1.5 - t); }, 3, 64));
  EXPECT_EQ(mixed.status, PdStatus::EmpiricallyStrictPd);

  const auto even = certify(expand_function([](double t) { return std::sin(3 * t) + t * t; }, 3, 64));
  EXPECT_EQ(even.status, PdStatus::EvenPartPolynomial);
}

TEST(Certify, ActivationCensus) {
  EXPECT_EQ(certify(expand(Activation::relu(), 3, 128)).status, PdStatus::OddPartPolynomial);
  EXPECT_EQ(certify(expand(Activation::wendland2(3), 3, 128)).status, PdStatus::EmpiricallyStrictPd);
}

TEST(Certify, NeedsEnoughModes) {
  EXPECT_THROW(certify(expand(Activation::relu(), 3, 32)), ConfigError);
}

TEST(Certify, StatusNames) {
  EXPECT_EQ(to_string(PdStatus::EmpiricallyStrictPd), "EMPIRICALLY_STRICT_PD");
  EXPECT_EQ(to_string(PdStatus::OddPartPolynomial), "ODD_PART_POLYNOMIAL");
}
