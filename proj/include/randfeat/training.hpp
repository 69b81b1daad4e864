#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "randfeat/activation.hpp"
#include "randfeat/features.hpp"

namespace randfeat {

enum class StepRule {
  Fixed,         // user eta
  LemmaOptimal,  // 2 / (sigma_min^2 + sigma_max^2)
  SpectralCap,   // user eta checked against 2 / lambda_max, default 1 / lambda_max
};

std::string_view to_string(StepRule rule);
StepRule parse_step_rule(std::string_view name);

struct TrainConfig {
  StepRule step_rule = StepRule::LemmaOptimal;
  double eta = 0.0;
  std::int64_t max_iters = 10000;
  double residual_tol = 0.0;  // absolute, on ||Z alpha - y||
  bool record_iterates = true;
  bool record_all = false;  // record every k instead of the thinned schedule
};

inline constexpr double kDivergenceFactor = 1e3;

/// k in {0..20} or a power of two.
bool is_recorded_iteration(std::int64_t k);

struct TrainTrace {
  double eta = 0.0;
  std::vector<double> residuals;  // ||Z alpha^(k) - y|| for k = 0..iterations
  std::vector<std::int64_t> recorded_k;
  std::vector<Eigen::VectorXd> iterates;     // at recorded_k (if record_iterates)
  std::vector<double> least_norm_gap;        // at recorded_k; empty if Z is rank deficient
  Eigen::MatrixXd filter_values;             // row per recorded k, column per sigma_j
  Eigen::VectorXd sigma;                     // singular values of Z, descending
  Eigen::VectorXd alpha;                     // final iterate
  std::int64_t iterations = 0;
  bool converged = false;
  double kappa = 0.0;                        // lambda_max / lambda_min of Z Z^T
};

/// f_k(sigma) = 1 - (1 - eta sigma^2)^k.
double landweber_filter(double sigma, double eta, std::int64_t k);

/// V Sigma^{-1} U^T y. Throws RankDeficientError unless Z has full row rank.
Eigen::VectorXd least_norm_solution(const Eigen::MatrixXd& z, const Eigen::VectorXd& y);

/// alpha <- alpha - eta Z^T (Z alpha - y), starting from alpha0.
TrainTrace gradient_descent(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const TrainConfig& cfg,
                            const Eigen::VectorXd& alpha0);

/// Closed-form k-th gradient descent iterate from alpha0 = 0: V f_k(Sigma) Sigma^{-1} U^T y.
Eigen::VectorXd landweber_oracle(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double eta, std::int64_t k);
Eigen::VectorXd landweber_oracle(const SpectralReport& svd, const Eigen::VectorXd& y, double eta, std::int64_t k);

struct ResidualDecomposition {
  double residual = 0.0;
  Eigen::VectorXd terms;  // (u_j^T y)^2 (1 - eta sigma_j^2)^(2k)
};

ResidualDecomposition residual_decomposition(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double eta,
                                             std::int64_t k);
ResidualDecomposition residual_decomposition(const SpectralReport& svd, const Eigen::VectorXd& y, double eta,
                                             std::int64_t k);

/// Features gamma(X W) / sqrt(m), then gradient descent from zero.
TrainTrace train_last_layer(const Eigen::MatrixXd& x, const Activation& act, const WeightMatrix& w,
                            const Eigen::VectorXd& y, const TrainConfig& cfg);

struct JointTrainConfig {
  int batch = 10;
  double momentum = 0.9;
  double weight_decay = 1e-5;
  double lr = 0.1;
  double lr_decay = 0.99;  // multiplied into lr after every epoch
  int epochs = 50;
  bool single_precision = false;
};

struct JointTrainTrace {
  std::vector<double> kappa;  // kappa(gamma(X W) gamma(X W)^T) after each epoch; entry 0 is the initial state
  std::vector<double> loss;   // mean of (f(x_i) - y_i)^2 / 2 over the data set
};

/// SGD with momentum on (W, alpha) for f(x) = alpha^T gamma(W^T x) / sqrt(m).
/// W starts uniform on the sphere, alpha at zero.
JointTrainTrace joint_train(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Activation& act,
                            Eigen::Index m, const JointTrainConfig& cfg, std::uint64_t seed);

}  // namespace randfeat
