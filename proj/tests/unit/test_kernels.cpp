#include <gtest/gtest.h>

#include <stdexcept>

#include "randfeat/activation.hpp"
#include "randfeat/data.hpp"
#include "randfeat/errors.hpp"
#include "randfeat/features.hpp"
#include "randfeat/kernels.hpp"

using namespace randfeat;

TEST(Kernels, ApplyActivationSerialEqualsParallel) {
  const auto x = uniform_sphere(64, 5, 1).points;
  const auto w = sample_weights(5, 300, WeightDistribution::UniformSphere, 2).w;
  Eigen::MatrixXd a = x * w;
  Eigen::MatrixXd b = a;
  const auto act = Activation::wendland2(5);
  kernels::serial::apply_activation(a, act, kernels::ActivationDomain::Sphere);
  kernels::parallel::apply_activation(b, act, kernels::ActivationDomain::Sphere);
  EXPECT_EQ(a, b);
  EXPECT_DOUBLE_EQ(a(3, 7), act((x * w)(3, 7)));
}

TEST(Kernels, SphereDomainRejectsLargeArguments) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(4, 4, 0.5);
  p(2, 3) = 1.5;
  Eigen::MatrixXd q = p;
  EXPECT_THROW(kernels::parallel::apply_activation(p, Activation::relu(), kernels::ActivationDomain::Sphere),
               DomainError);
  kernels::serial::apply_activation(q, Activation::relu(), kernels::ActivationDomain::Real);
  EXPECT_EQ(q(2, 3), 1.5);
}

TEST(Kernels, BlockGramIndependentOfThreadCount) {
  const Eigen::Index n = 37;
  auto block = [n](std::size_t b) {
    Eigen::MatrixXd z(n, 50);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < 50; ++j) z(i, j) = std::sin(0.1 * i + 0.37 * j + 1.3 * static_cast<double>(b));
    return z;
  };
  const auto ref = kernels::serial::block_gram(n, 9, block, 0.25);
  const int saved = kernels::max_threads();
  for (int t : {1, 2, 5}) {
    kernels::set_num_threads(t);
    EXPECT_EQ(kernels::parallel::block_gram(n, 9, block, 0.25), ref) << t << " threads";
  }
  kernels::set_num_threads(saved);

  Eigen::MatrixXd dense(n, 9 * 50);
  for (std::size_t b = 0; b < 9; ++b) dense.middleCols(static_cast<Eigen::Index>(b) * 50, 50) = block(b);
  const Eigen::MatrixXd direct = 0.25 * dense * dense.transpose();
  EXPECT_LT((ref - direct).cwiseAbs().maxCoeff(), 1e-12 * direct.cwiseAbs().maxCoeff());
  EXPECT_EQ(ref, ref.transpose());
}

TEST(Kernels, PopulationMatrixSerialEqualsParallel) {
  const auto x = uniform_sphere(90, 4, 8).points;
  auto f = [](double t) { return std::exp(t) * std::cos(3 * t); };
  const auto a = kernels::serial::population_matrix(x, f);
  const auto b = kernels::parallel::population_matrix(x, f);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, a.transpose());
}

TEST(Kernels, ExceptionsLeaveParallelRegions) {
  EXPECT_THROW(kernels::parallel::for_each_task(64,
                                                [](std::size_t i) {
                                                  if (i == 17) throw NumericError("task 17");
                                                }),
               NumericError);
  auto bad_block = [](std::size_t b) -> Eigen::MatrixXd {
    if (b == 3) throw std::runtime_error("block 3");
    return Eigen::MatrixXd::Ones(4, 2);
  };
  EXPECT_THROW(kernels::parallel::block_gram(4, 8, bad_block, 1.0), std::runtime_error);
  const auto x = uniform_sphere(30, 3, 1).points;
  EXPECT_THROW(kernels::parallel::population_matrix(x, [](double t) -> double {
                 if (t < 0.0) throw DomainError("negative");
                 return t;
               }),
               DomainError);
}

TEST(Kernels, ForEachTaskVisitsEveryIndexOnce) {
  std::vector<int> hits(200, 0);
  kernels::parallel::for_each_task(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}
