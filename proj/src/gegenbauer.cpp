#include "randfeat/gegenbauer.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "randfeat/errors.hpp"

namespace randfeat {
namespace {

// Off-diagonal of the symmetric Jacobi matrix of the Gegenbauer family.
double jacobi_offdiag(int k, double tau) {
  const double kk = k;
  return std::sqrt(kk * (kk + 2.0 * tau - 1.0) / (4.0 * (kk + tau) * (kk + tau - 1.0)));
}

double log_weight_mass(double tau) {
  return 0.5 * std::log(std::numbers::pi) + std::lgamma(tau + 0.5) - std::lgamma(tau + 1.0);
}

struct OrthonormalEval {
  double value;       // p_n(t)
  double derivative;  // p_n'(t)
  double christoffel; // sum_{k<n} p_k(t)^2
};

// Orthonormal recurrence t p_k = b_{k+1} p_{k+1} + b_k p_{k-1}, differentiated alongside.
OrthonormalEval eval_orthonormal(int n, double t, const std::vector<double>& b,
                                 double p0) {
  double pm1 = 0.0, dm1 = 0.0;
  double p = p0, dp = 0.0;
  double sum = p0 * p0;
  for (int k = 0; k < n; ++k) {
    const double bk = k == 0 ? 0.0 : b[k];
    const double pn = (t * p - bk * pm1) / b[k + 1];
    const double dn = (p + t * dp - bk * dm1) / b[k + 1];
    pm1 = p;
    dm1 = dp;
    p = pn;
    dp = dn;
    if (k + 1 < n) sum += p * p;
  }
  return {p, dp, sum};
}

}  // namespace

void gegenbauer_values(double tau, double t, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = 2.0 * tau * t;
  for (std::size_t k = 2; k < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k] = (2.0 * (kk + tau - 1.0) * t * out[k - 1] - (kk + 2.0 * tau - 2.0) * out[k - 2]) / kk;
  }
}

double gegenbauer(int n, double tau, double t) {
  if (n == 0) return 1.0;
  double cm2 = 1.0;
  double cm1 = 2.0 * tau * t;
  for (int k = 2; k <= n; ++k) {
    const double c = (2.0 * (k + tau - 1.0) * t * cm1 - (k + 2.0 * tau - 2.0) * cm2) / k;
    cm2 = cm1;
    cm1 = c;
  }
  return cm1;
}

double gegenbauer_at_one(int k, double tau) {
  return std::exp(std::lgamma(k + 2.0 * tau) - std::lgamma(2.0 * tau) - std::lgamma(k + 1.0));
}

double log_gegenbauer_norm(int k, double tau) {
  return std::log(std::numbers::pi) + (1.0 - 2.0 * tau) * std::log(2.0) +
         std::lgamma(k + 2.0 * tau) - std::lgamma(k + 1.0) - std::log(k + tau) -
         2.0 * std::lgamma(tau);
}

QuadratureRule gauss_gegenbauer(int n, double tau) {
  if (n < 1) throw ConfigError("quadrature needs at least one node");
  if (!(tau > 0.0)) throw DomainError(fmt::format("Gegenbauer parameter must be positive, got {}", tau));

  std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) b[k] = jacobi_offdiag(k, tau);
  const double p0 = std::exp(-0.5 * log_weight_mass(tau));

  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  const int half = (n + 1) / 2;
  double prev = 1.0;
  for (int i = 1; i <= half; ++i) {
    double t;
    if (n % 2 == 1 && i == half) {
      t = 0.0;
    } else {
      t = std::cos((i + 0.5 * tau - 0.5) * std::numbers::pi / (n + tau));
      bool converged = false;
      for (int it = 0; it < 100; ++it) {
        const auto e = eval_orthonormal(n, t, b, p0);
        const double step = e.value / e.derivative;
        t -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(t))) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        // Newton may stall at roundoff level; accept if the residual is tiny.
        const auto e = eval_orthonormal(n, t, b, p0);
        if (!(std::abs(e.value / e.derivative) < 1e-13)) {
          throw NumericError(fmt::format("Gauss-Gegenbauer node {} of {} did not converge", i, n));
        }
      }
    }
    if (!(t < prev) || !(t >= 0.0)) {
      throw NumericError(fmt::format("Gauss-Gegenbauer nodes not separated at node {} of {}", i, n));
    }
    prev = t;
    const double w = 1.0 / eval_orthonormal(n, t, b, p0).christoffel;
    // Ascending storage: node i (descending from 1) goes to position n - i.
    rule.nodes[n - i] = t;
    rule.weights[n - i] = w;
    rule.nodes[i - 1] = -t;
    rule.weights[i - 1] = w;
  }
  return rule;
}

}  // namespace randfeat
