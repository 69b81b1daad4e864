#include "randfeat/training.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "randfeat/data.hpp"
#include "randfeat/errors.hpp"

namespace randfeat {
namespace {

void require_full_row_rank(const SpectralReport& rep) {
  if (rep.singular) {
    throw RankDeficientError(
        fmt::format("feature matrix is rank deficient: lambda_min = {:.6g} <= {:.3g} * lambda_max = {:.6g}",
                    rep.lambda_min, kRankTolerance, kRankTolerance * rep.lambda_max),
        rep.lambda_min, kRankTolerance * rep.lambda_max);
  }
}

void check_system(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
  if (z.rows() != y.size()) {
    throw ConfigError(fmt::format("Z has {} rows but y has {} entries", z.rows(), y.size()));
  }
  if (!z.allFinite() || !y.allFinite()) throw NumericError("training inputs have non-finite entries");
}

double resolve_eta(const TrainConfig& cfg, const SpectralReport& rep) {
  const double sigma_max_sq = rep.lambda_max;
  switch (cfg.step_rule) {
    case StepRule::Fixed:
      if (!(cfg.eta > 0.0)) throw ConfigError("fixed step rule needs eta > 0");
      return cfg.eta;
    case StepRule::LemmaOptimal:
      return 2.0 / (rep.lambda_min + sigma_max_sq);
    case StepRule::SpectralCap:
      if (cfg.eta == 0.0) return 1.0 / sigma_max_sq;
      if (!(cfg.eta > 0.0 && cfg.eta < 2.0 / sigma_max_sq)) {
        throw ConfigError(fmt::format("eta = {} outside (0, 2/lambda_max) = (0, {})", cfg.eta, 2.0 / sigma_max_sq));
      }
      return cfg.eta;
  }
  return cfg.eta;
}

// U^T y
Eigen::VectorXd projected_labels(const SpectralReport& svd, const Eigen::VectorXd& y) {
  if (!svd.u) throw ConfigError("spectral report carries no SVD");
  if (svd.u->rows() != y.size()) throw ConfigError("label vector does not match the SVD");
  return svd.u->transpose() * y;
}

}  // namespace

std::string_view to_string(StepRule rule) {
  switch (rule) {
    case StepRule::Fixed: return "fixed";
    case StepRule::LemmaOptimal: return "optimal";
    case StepRule::SpectralCap: return "spectral-cap";
  }
  return "unknown";
}

StepRule parse_step_rule(std::string_view name) {
  if (name == "fixed") return StepRule::Fixed;
  if (name == "optimal" || name == "lemma-optimal") return StepRule::LemmaOptimal;
  if (name == "spectral-cap" || name == "cap") return StepRule::SpectralCap;
  throw ConfigError(fmt::format("unknown step rule '{}'", name));
}

bool is_recorded_iteration(std::int64_t k) {
  return k <= 20 || (k > 0 && (k & (k - 1)) == 0);
}

double landweber_filter(double sigma, double eta, std::int64_t k) {
  if (k == 0) return 0.0;
  const double x = eta * sigma * sigma;
  if (x <= 1.0) return -std::expm1(static_cast<double>(k) * std::log1p(-x));
  return 1.0 - std::pow(1.0 - x, static_cast<double>(k));
}

Eigen::VectorXd least_norm_solution(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
  check_system(z, y);
  const auto svd = spectral_report_svd(z);
  require_full_row_rank(svd);
  const Eigen::VectorXd coeffs = projected_labels(svd, y).cwiseQuotient(*svd.sigma);
  return *svd.v * coeffs;
}

Eigen::VectorXd landweber_oracle(const SpectralReport& svd, const Eigen::VectorXd& y, double eta, std::int64_t k) {
  require_full_row_rank(svd);
  if (k < 0) throw DomainError("iteration count must be non-negative");
  Eigen::VectorXd coeffs = projected_labels(svd, y);
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    const double s = (*svd.sigma)(j);
    coeffs(j) *= landweber_filter(s, eta, k) / s;
  }
  return *svd.v * coeffs;
}

Eigen::VectorXd landweber_oracle(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double eta, std::int64_t k) {
  check_system(z, y);
  return landweber_oracle(spectral_report_svd(z), y, eta, k);
}

ResidualDecomposition residual_decomposition(const SpectralReport& svd, const Eigen::VectorXd& y, double eta,
                                             std::int64_t k) {
  require_full_row_rank(svd);
  if (k < 0) throw DomainError("iteration count must be non-negative");
  const Eigen::VectorXd proj = projected_labels(svd, y);
  ResidualDecomposition out;
  out.terms.resize(proj.size());
  for (Eigen::Index j = 0; j < proj.size(); ++j) {
    const double s = (*svd.sigma)(j);
    const double decay = 1.0 - landweber_filter(s, eta, k);
    out.terms(j) = proj(j) * proj(j) * decay * decay;
  }
  out.residual = std::sqrt(out.terms.sum());
  return out;
}

ResidualDecomposition residual_decomposition(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double eta,
                                             std::int64_t k) {
  check_system(z, y);
  return residual_decomposition(spectral_report_svd(z), y, eta, k);
}

TrainTrace gradient_descent(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const TrainConfig& cfg,
                            const Eigen::VectorXd& alpha0) {
  check_system(z, y);
  if (alpha0.size() != z.cols()) {
    throw ConfigError(fmt::format("alpha0 has {} entries, Z has {} columns", alpha0.size(), z.cols()));
  }
  if (cfg.max_iters < 0) throw ConfigError("max_iters must be non-negative");
  const auto svd = spectral_report_svd(z);

  TrainTrace trace;
  trace.eta = resolve_eta(cfg, svd);
  trace.sigma = *svd.sigma;
  trace.kappa = svd.kappa;
  Eigen::VectorXd alpha_ln;
  if (!svd.singular) {
    alpha_ln = *svd.v * projected_labels(svd, y).cwiseQuotient(*svd.sigma);
  }

  std::vector<Eigen::RowVectorXd> filters;
  auto record = [&](std::int64_t k, const Eigen::VectorXd& alpha) {
    trace.recorded_k.push_back(k);
    if (cfg.record_iterates) trace.iterates.push_back(alpha);
    if (alpha_ln.size() > 0) trace.least_norm_gap.push_back((alpha - alpha_ln).norm());
    Eigen::RowVectorXd f(trace.sigma.size());
    for (Eigen::Index j = 0; j < f.size(); ++j) f(j) = landweber_filter(trace.sigma(j), trace.eta, k);
    filters.push_back(std::move(f));
  };

  Eigen::VectorXd alpha = alpha0;
  Eigen::VectorXd r = z * alpha - y;
  const double r0 = r.norm();
  trace.residuals.push_back(r0);
  std::int64_t k = 0;
  while (true) {
    const double res = trace.residuals.back();
    if (res <= cfg.residual_tol) {
      trace.converged = true;
      break;
    }
    if (k == cfg.max_iters) break;
    if (cfg.record_all || is_recorded_iteration(k)) record(k, alpha);
    alpha.noalias() -= trace.eta * (z.transpose() * r);
    r.noalias() = z * alpha;
    r -= y;
    ++k;
    const double next = r.norm();
    if (!std::isfinite(next) || next > kDivergenceFactor * r0) {
      throw NumericError(fmt::format(
          "gradient descent diverged at iteration {}: residual {:.6g} > {} x initial {:.6g}; eta = {:.6g}, "
          "admissible range is (0, 2/lambda_max) = (0, {:.6g})",
          k, next, kDivergenceFactor, r0, trace.eta, 2.0 / svd.lambda_max));
    }
    trace.residuals.push_back(next);
  }
  if (trace.recorded_k.empty() || trace.recorded_k.back() != k) record(k, alpha);
  trace.iterations = k;
  trace.alpha = std::move(alpha);
  trace.filter_values.resize(static_cast<Eigen::Index>(filters.size()), trace.sigma.size());
  for (std::size_t i = 0; i < filters.size(); ++i) trace.filter_values.row(static_cast<Eigen::Index>(i)) = filters[i];
  return trace;
}

TrainTrace train_last_layer(const Eigen::MatrixXd& x, const Activation& act, const WeightMatrix& w,
                            const Eigen::VectorXd& y, const TrainConfig& cfg) {
  const auto est = feature_matrix(x, w, act);
  const auto rep = spectral_report(est.h_hat);
  if (rep.singular) {
    std::string hint;
    if (act.kind() == ActivationKind::ReLU && find_bad_point_set(x)) {
      hint = "; the data contain the eight-point set (+-s,+-s,+-s), on which bias-free ReLU features are "
             "rank deficient for every width and every weight draw";
    }
    throw RankDeficientError(
        fmt::format("feature system is not full row rank: lambda_min(H_hat) = {:.6g}, tolerance {:.3g}{}",
                    rep.lambda_min, kRankTolerance * rep.lambda_max, hint),
        rep.lambda_min, kRankTolerance * rep.lambda_max);
  }
  return gradient_descent(est.z, y, cfg, Eigen::VectorXd::Zero(est.z.cols()));
}

}  // namespace randfeat
