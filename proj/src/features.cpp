#include "randfeat/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "randfeat/errors.hpp"
#include "randfeat/kernels.hpp"
#include "randfeat/rng.hpp"

namespace randfeat {
namespace {

void check_activation_dimension(const Activation& act, Eigen::Index d) {
  const bool wendland = act.kind() == ActivationKind::Wendland0 || act.kind() == ActivationKind::Wendland2;
  if (wendland && act.dimension() != d) {
    throw ConfigError(fmt::format("{} configured for d = {} but points have dimension {}", act.name(),
                                  act.dimension(), d));
  }
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw NumericError(fmt::format("{} has non-finite entries", what));
}

kernels::ActivationDomain domain_for(WeightDistribution dist) {
  return dist == WeightDistribution::UniformSphere ? kernels::ActivationDomain::Sphere
                                                   : kernels::ActivationDomain::Real;
}

std::size_t block_count(Eigen::Index m) {
  return static_cast<std::size_t>((m + kWeightBlock - 1) / kWeightBlock);
}

Eigen::Index block_cols(std::size_t b, Eigen::Index m) {
  return std::min<Eigen::Index>(kWeightBlock, m - static_cast<Eigen::Index>(b) * kWeightBlock);
}

// gamma(X W_block) / sqrt(m), applied serially so blocks are reproducible on any thread.
Eigen::MatrixXd feature_block(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w_block, const Activation& act,
                              WeightDistribution dist, double inv_sqrt_m) {
  Eigen::MatrixXd z = x * w_block;
  kernels::serial::apply_activation(z, act, domain_for(dist));
  z *= inv_sqrt_m;
  return z;
}

WidthBound finish(double value, bool up_to_constant = false) {
  if (!std::isfinite(value) || value >= 9.2e18) {
    throw NumericError(fmt::format("width bound {} does not fit a 64-bit integer", value));
  }
  return {static_cast<std::int64_t>(std::ceil(value)), value, up_to_constant};
}

void validate_query(const WidthBoundQuery& q) {
  if (!(q.n >= 1.0)) throw DomainError("width bound: n must be >= 1");
  if (!(q.c > 0.0)) throw DomainError("width bound: C must be positive");
  if (!(q.delta > 0.0 && q.delta < 1.0)) throw DomainError("width bound: delta must lie in (0, 1)");
  if (!(q.lambda_min > 0.0)) {
    throw DomainError(fmt::format("width bound is vacuous for lambda_min = {}", q.lambda_min));
  }
}

}  // namespace

std::string_view to_string(WeightDistribution dist) {
  return dist == WeightDistribution::UniformSphere ? "uniform_sphere" : "gaussian";
}

WeightDistribution parse_weight_distribution(std::string_view name) {
  if (name == "uniform_sphere" || name == "uniform" || name == "sphere") return WeightDistribution::UniformSphere;
  if (name == "gaussian" || name == "normal") return WeightDistribution::Gaussian;
  throw ConfigError(fmt::format("unknown weight distribution '{}'", name));
}

Eigen::MatrixXd weight_block(int d, std::size_t block, Eigen::Index cols, WeightDistribution dist,
                             std::uint64_t seed) {
  GaussianStream g(derive_seed(seed, block));
  Eigen::MatrixXd w(d, cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    if (dist == WeightDistribution::Gaussian) {
      for (int i = 0; i < d; ++i) w(i, k) = g();
      continue;
    }
    double norm = 0.0;
    do {
      for (int i = 0; i < d; ++i) w(i, k) = g();
      norm = w.col(k).norm();
    } while (norm == 0.0);
    w.col(k) /= norm;
  }
  return w;
}

WeightMatrix sample_weights(int d, Eigen::Index m, WeightDistribution dist, std::uint64_t seed) {
  if (d < 2) throw DomainError(fmt::format("weights need d >= 2, got {}", d));
  if (m < 1) throw DomainError(fmt::format("weights need m >= 1, got {}", m));
  WeightMatrix out;
  out.w.resize(d, m);
  out.distribution = dist;
  out.seed = seed;
  for (std::size_t b = 0; b < block_count(m); ++b) {
    const Eigen::Index cols = block_cols(b, m);
    out.w.middleCols(static_cast<Eigen::Index>(b) * kWeightBlock, cols) = weight_block(d, b, cols, dist, seed);
  }
  return out;
}

GramEstimate feature_matrix(const Eigen::MatrixXd& x, const WeightMatrix& w, const Activation& act) {
  if (x.cols() != w.w.rows()) {
    throw ConfigError(fmt::format("points have dimension {} but weights have {} rows", x.cols(), w.w.rows()));
  }
  check_activation_dimension(act, x.cols());
  const Eigen::Index m = w.w.cols();
  GramEstimate out;
  out.activation = act.spec();
  out.distribution = w.distribution;
  out.seed = w.seed;
  out.z = feature_block(x, w.w, act, w.distribution, 1.0 / std::sqrt(static_cast<double>(m)));
  out.h_hat = kernels::serial::block_gram(
      x.rows(), block_count(m),
      [&](std::size_t b) -> Eigen::MatrixXd {
        return out.z.middleCols(static_cast<Eigen::Index>(b) * kWeightBlock, block_cols(b, m));
      },
      1.0);
  check_finite(out.h_hat, "H_hat");
  return out;
}

Eigen::MatrixXd streamed_gram(const Eigen::MatrixXd& x, Eigen::Index m, WeightDistribution dist,
                              std::uint64_t seed, const Activation& act, bool parallel) {
  if (m < 1) throw DomainError(fmt::format("width must be >= 1, got {}", m));
  check_activation_dimension(act, x.cols());
  const int d = static_cast<int>(x.cols());
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  auto block = [&](std::size_t b) {
    return feature_block(x, weight_block(d, b, block_cols(b, m), dist, seed), act, dist, inv_sqrt_m);
  };
  Eigen::MatrixXd h = parallel ? kernels::parallel::block_gram(x.rows(), block_count(m), block, 1.0)
                               : kernels::serial::block_gram(x.rows(), block_count(m), block, 1.0);
  check_finite(h, "H_hat");
  return h;
}

Eigen::MatrixXd indicator_matrix(const Eigen::MatrixXd& x, const WeightMatrix& w) {
  if (x.cols() != w.w.rows()) {
    throw ConfigError(fmt::format("points have dimension {} but weights have {} rows", x.cols(), w.w.rows()));
  }
  return (x * w.w).unaryExpr([](double t) { return t > 0.0 ? 1.0 : 0.0; });
}

Eigen::MatrixXd ntk_estimate(const Eigen::MatrixXd& x, const WeightMatrix& w) {
  const Eigen::MatrixXd ind = indicator_matrix(x, w);
  const Eigen::Index m = w.w.cols();
  Eigen::MatrixXd counts = kernels::serial::block_gram(
      x.rows(), block_count(m),
      [&](std::size_t b) -> Eigen::MatrixXd {
        return ind.middleCols(static_cast<Eigen::Index>(b) * kWeightBlock, block_cols(b, m));
      },
      1.0);
  return (x * x.transpose()).cwiseProduct(counts) / static_cast<double>(m);
}

SpectralReport spectral_report(const Eigen::MatrixXd& sym) {
  if (sym.rows() != sym.cols() || sym.rows() == 0) throw ConfigError("spectral_report needs a square matrix");
  check_finite(sym, "matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("symmetric eigendecomposition failed");
  SpectralReport out;
  out.eigenvalues = eig.eigenvalues().reverse();
  out.lambda_max = out.eigenvalues(0);
  out.lambda_min = out.eigenvalues(out.eigenvalues.size() - 1);
  out.singular = out.lambda_min <= kRankTolerance * out.lambda_max;
  out.kappa = out.lambda_min > 0.0 ? out.lambda_max / out.lambda_min : std::numeric_limits<double>::infinity();
  return out;
}

SpectralReport spectral_report_svd(const Eigen::MatrixXd& z) {
  if (z.size() == 0) throw ConfigError("spectral_report_svd needs a non-empty matrix");
  check_finite(z, "Z");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("SVD failed");
  SpectralReport out;
  out.u = svd.matrixU();
  out.sigma = svd.singularValues();
  out.v = svd.matrixV();
  out.eigenvalues = Eigen::VectorXd::Zero(z.rows());
  out.eigenvalues.head(out.sigma->size()) = out.sigma->array().square();
  out.lambda_max = out.eigenvalues(0);
  out.lambda_min = out.eigenvalues(out.eigenvalues.size() - 1);
  out.singular = out.lambda_min <= kRankTolerance * out.lambda_max;
  out.kappa = out.lambda_min > 0.0 ? out.lambda_max / out.lambda_min : std::numeric_limits<double>::infinity();
  return out;
}

WidthBound width_bound_chernoff(const WidthBoundQuery& q) {
  validate_query(q);
  return finish(10.0 * q.n * q.c * q.c * std::log(2.0 * q.n / q.delta) / q.lambda_min);
}

WidthBound width_bound_bernstein(const WidthBoundQuery& q) {
  validate_query(q);
  if (!(q.kappa >= 1.0)) throw DomainError(fmt::format("condition number must be >= 1, got {}", q.kappa));
  return finish(2.0 * q.n * q.c * q.c * (q.kappa + 2.0 / 3.0) * std::log(2.0 * q.n / q.delta) / q.lambda_min);
}

WidthBound width_bound_gaussian(const WidthBoundQuery& q) {
  validate_query(q);
  if (!(q.sigma1 > 0.0)) throw DomainError("largest singular value of X must be positive");
  if (!(q.abs_const > 0.0)) throw DomainError("absolute constant must be positive");
  const double value = q.abs_const * (2.0 * q.n + std::log(2.0 / q.delta)) * q.c * q.c * q.sigma1 * q.sigma1 /
                       (q.lambda_min * q.lambda_min);
  return finish(value, true);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SweepSummary> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    SweepSummary s;
    s.width = rows[i].width;
    std::vector<double> kappas;
    int singular = 0;
    for (; i < rows.size() && rows[i].width == s.width; ++i) {
      ++s.trials;
      if (rows[i].singular) {
        ++singular;
      } else {
        kappas.push_back(rows[i].kappa);
      }
    }
    s.singular_fraction = static_cast<double>(singular) / s.trials;
    s.median_kappa = quantile(kappas, 0.5);
    s.q10 = quantile(kappas, 0.1);
    s.q90 = quantile(kappas, 0.9);
    out.push_back(s);
  }
  return out;
}

SweepTable width_sweep(const Eigen::MatrixXd& x, const Activation& act, const SweepOptions& options) {
  if (options.trials < 1) throw ConfigError("sweep needs at least one trial");
  for (auto w : options.widths) {
    if (w < 1) throw ConfigError(fmt::format("sweep width must be positive, got {}", w));
  }
  check_activation_dimension(act, x.cols());
  SweepTable table;
  const auto trials = static_cast<std::size_t>(options.trials);
  table.rows.resize(options.widths.size() * trials);
  auto task = [&](std::size_t idx) {
    SweepRow& row = table.rows[idx];
    row.width = options.widths[idx / trials];
    row.trial = static_cast<int>(idx % trials);
    row.seed = trial_seed(options.base_seed, static_cast<std::uint64_t>(row.width),
                          static_cast<std::uint64_t>(row.trial));
    const auto h = streamed_gram(x, row.width, options.distribution, row.seed, act, false);
    const auto rep = spectral_report(h);
    row.kappa = rep.kappa;
    row.lambda_min = rep.lambda_min;
    row.lambda_max = rep.lambda_max;
    row.singular = rep.singular;
  };
  if (options.parallel) {
    kernels::parallel::for_each_task(table.rows.size(), task);
  } else {
    kernels::serial::for_each_task(table.rows.size(), task);
  }
  table.summary = summarize(table.rows);
  return table;
}

}  // namespace randfeat
