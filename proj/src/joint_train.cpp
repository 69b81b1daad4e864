#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "randfeat/errors.hpp"
#include "randfeat/rng.hpp"
#include "randfeat/training.hpp"

namespace randfeat {
namespace {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

double activation_slope(const Activation& act, double z) {
  switch (act.kind()) {
    case ActivationKind::ReLU:
      return z > 0.0 ? act.scale() : 0.0;
    case ActivationKind::Swish: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return act.scale() * (s + z * s * (1.0 - s));
    }
    default: {
      const double h = 1e-6;
      return (act.eval_raw(z + h) - act.eval_raw(z - h)) / (2.0 * h);
    }
  }
}

template <class T>
double feature_kappa(const Mat<T>& pre, const Activation& act) {
  Eigen::MatrixXd g = pre.template cast<double>();
  g = g.unaryExpr([&act](double z) { return act.eval_raw(z); });
  return spectral_report(g * g.transpose()).kappa;
}

template <class T>
JointTrainTrace run(const Eigen::MatrixXd& x_in, const Eigen::VectorXd& y_in, const Activation& act,
                    Eigen::Index m, const JointTrainConfig& cfg, std::uint64_t seed) {
  const Eigen::Index n = x_in.rows();
  const Mat<T> x = x_in.cast<T>();
  const Vec<T> y = y_in.cast<T>();
  Mat<T> w = sample_weights(static_cast<int>(x_in.cols()), m, WeightDistribution::UniformSphere,
                            derive_seed(seed, 0))
                 .w.cast<T>();
  Vec<T> alpha = Vec<T>::Zero(m);
  Mat<T> w_buf = Mat<T>::Zero(w.rows(), w.cols());
  Vec<T> a_buf = Vec<T>::Zero(m);
  const T inv_sqrt_m = T(1) / std::sqrt(static_cast<T>(m));
  const T mu = static_cast<T>(cfg.momentum);
  const T wd = static_cast<T>(cfg.weight_decay);
  auto gamma = [&act](T z) { return static_cast<T>(act.eval_raw(static_cast<double>(z))); };
  auto slope = [&act](T z) { return static_cast<T>(activation_slope(act, static_cast<double>(z))); };

  JointTrainTrace trace;
  auto snapshot = [&] {
    const Mat<T> pre = x * w;
    const Vec<T> f = pre.unaryExpr(gamma) * alpha * inv_sqrt_m;
    const double loss = 0.5 * (f - y).template cast<double>().squaredNorm() / static_cast<double>(n);
    if (!std::isfinite(loss)) {
      throw NumericError(fmt::format("joint training produced a non-finite loss after {} epochs (lr = {})",
                                     trace.loss.empty() ? 0 : trace.loss.size() - 1, cfg.lr));
    }
    trace.loss.push_back(loss);
    trace.kappa.push_back(feature_kappa<T>(pre, act));
  };
  snapshot();

  std::mt19937_64 shuffler(derive_seed(seed, 1));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  T lr = static_cast<T>(cfg.lr);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(shuffler, i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
      const auto bsz = static_cast<Eigen::Index>(stop - start);
      Mat<T> xb(bsz, x.cols());
      Vec<T> yb(bsz);
      for (Eigen::Index r = 0; r < bsz; ++r) {
        xb.row(r) = x.row(order[start + static_cast<std::size_t>(r)]);
        yb(r) = y(order[start + static_cast<std::size_t>(r)]);
      }
      const Mat<T> pre = xb * w;           // b x m
      const Mat<T> act_b = pre.unaryExpr(gamma);
      const Vec<T> resid = (act_b * alpha * inv_sqrt_m - yb) / static_cast<T>(bsz);
      Vec<T> grad_a = act_b.transpose() * resid * inv_sqrt_m;
      // d/dW: x_i (alpha .* gamma'(W^T x_i))^T r_i / sqrt(m)
      Mat<T> back = pre.unaryExpr(slope);
      back.array().rowwise() *= alpha.transpose().array() * inv_sqrt_m;
      back.array().colwise() *= resid.array();
      Mat<T> grad_w = xb.transpose() * back;
      grad_a += wd * alpha;
      grad_w += wd * w;
      a_buf = mu * a_buf + grad_a;
      w_buf = mu * w_buf + grad_w;
      alpha -= lr * a_buf;
      w -= lr * w_buf;
    }
    lr *= static_cast<T>(cfg.lr_decay);
    snapshot();
  }
  return trace;
}

}  // namespace

JointTrainTrace joint_train(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Activation& act,
                            Eigen::Index m, const JointTrainConfig& cfg, std::uint64_t seed) {
  if (m < 1) throw ConfigError("joint training needs m >= 1");
  if (x.rows() == 0) throw ConfigError("joint training needs a non-empty data set");
  if (x.rows() != y.size()) throw ConfigError("label count differs from point count");
  if (cfg.batch < 1 || cfg.epochs < 0) throw ConfigError("batch must be >= 1 and epochs >= 0");
  if (cfg.single_precision) return run<float>(x, y, act, m, cfg, seed);
  return run<double>(x, y, act, m, cfg, seed);
}

}  // namespace randfeat
