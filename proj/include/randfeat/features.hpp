#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "randfeat/activation.hpp"

namespace randfeat {

enum class WeightDistribution { UniformSphere, Gaussian };

std::string_view to_string(WeightDistribution dist);
WeightDistribution parse_weight_distribution(std::string_view name);

/// Columns are generated in blocks of this many; block b draws from its own
/// stream derive_seed(seed, b), so any column range can be regenerated alone.
inline constexpr Eigen::Index kWeightBlock = 1024;

struct WeightMatrix {
  Eigen::MatrixXd w;  // d x m
  WeightDistribution distribution = WeightDistribution::UniformSphere;
  std::uint64_t seed = 0;
};

/// Columns [b * kWeightBlock, b * kWeightBlock + cols) of the d x m weight matrix for `seed`.
Eigen::MatrixXd weight_block(int d, std::size_t block, Eigen::Index cols, WeightDistribution dist,
                             std::uint64_t seed);

WeightMatrix sample_weights(int d, Eigen::Index m, WeightDistribution dist, std::uint64_t seed);

struct GramEstimate {
  Eigen::MatrixXd z;      // n x m, gamma(X W) / sqrt(m)
  Eigen::MatrixXd h_hat;  // n x n, Z Z^T
  std::string activation;
  WeightDistribution distribution = WeightDistribution::UniformSphere;
  std::uint64_t seed = 0;
};

/// X holds one point per row. Uniform weights evaluate gamma on [-1, 1]
/// (clamping roundoff); Gaussian weights evaluate gamma on the raw product.
GramEstimate feature_matrix(const Eigen::MatrixXd& x, const WeightMatrix& w, const Activation& act);

/// H_hat for m weights drawn from (dist, seed) without storing Z. Blocks are
/// processed in parallel and reduced in block order.
Eigen::MatrixXd streamed_gram(const Eigen::MatrixXd& x, Eigen::Index m, WeightDistribution dist,
                              std::uint64_t seed, const Activation& act, bool parallel = true);

/// n x m indicator matrix 1[x_i^T w_k > 0].
Eigen::MatrixXd indicator_matrix(const Eigen::MatrixXd& x, const WeightMatrix& w);

/// G_hat_jk = (1/m) sum_i x_j^T x_k 1[x_j^T w_i > 0] 1[x_k^T w_i > 0].
Eigen::MatrixXd ntk_estimate(const Eigen::MatrixXd& x, const WeightMatrix& w);

inline constexpr double kRankTolerance = 1e-12;

struct SpectralReport {
  Eigen::VectorXd eigenvalues;  // descending
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;  // +inf when lambda_min <= 0
  bool singular = false;
  // Thin SVD of Z (filled by spectral_report_svd only).
  std::optional<Eigen::MatrixXd> u;
  std::optional<Eigen::VectorXd> sigma;
  std::optional<Eigen::MatrixXd> v;
};

/// Eigenvalues of a symmetric matrix.
SpectralReport spectral_report(const Eigen::MatrixXd& sym);
/// Squared singular values of Z (n x m), padded with zeros to n when m < n.
SpectralReport spectral_report_svd(const Eigen::MatrixXd& z);

struct WidthBoundQuery {
  double n = 1.0;
  double c = 1.0;
  double delta = 0.05;
  double lambda_min = 1.0;
  double kappa = 1.0;
  double sigma1 = 1.0;
  double abs_const = 1.0;
};

struct WidthBound {
  std::int64_t m = 0;
  double value = 0.0;  // before the ceiling
  bool up_to_constant = false;
};

/// ceil(10 n C^2 ln(2n/delta) / lambda_min)
WidthBound width_bound_chernoff(const WidthBoundQuery& q);
/// ceil(2 n C^2 (kappa + 2/3) ln(2n/delta) / lambda_min)
WidthBound width_bound_bernstein(const WidthBoundQuery& q);
/// ceil(abs_const (2n + ln(2/delta)) C^2 sigma1^2 / lambda_min^2), Gaussian weights.
WidthBound width_bound_gaussian(const WidthBoundQuery& q);

struct SweepOptions {
  std::vector<Eigen::Index> widths;
  int trials = 1;
  WeightDistribution distribution = WeightDistribution::UniformSphere;
  std::uint64_t base_seed = 0;
  bool parallel = true;
};

struct SweepRow {
  Eigen::Index width = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double kappa = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool singular = false;
};

struct SweepSummary {
  Eigen::Index width = 0;
  double median_kappa = 0.0;  // over non-singular trials; NaN if none
  double q10 = 0.0;
  double q90 = 0.0;
  double singular_fraction = 0.0;
  int trials = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;  // ordered by (width, trial)
  std::vector<SweepSummary> summary;
};

SweepTable width_sweep(const Eigen::MatrixXd& x, const Activation& act, const SweepOptions& options);
std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

/// Linear-interpolation sample quantile (R type 7) of unsorted values.
double quantile(std::vector<double> values, double p);

}  // namespace randfeat
