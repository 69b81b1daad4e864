#include "randfeat/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

#include "randfeat/errors.hpp"
#include "randfeat/gegenbauer.hpp"
#include "randfeat/kernels.hpp"

namespace randfeat {
namespace {

constexpr int kReconstructionGridPoints = 1024;

const QuadratureRule& cached_rule(int n, double tau) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(n, tau);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, gauss_gegenbauer(n, tau)).first;
  return it->second;
}

int resolve_nodes(int truncation_k, int nodes) {
  if (nodes == 0) return std::max(2 * truncation_k, kMinQuadratureNodes);
  if (nodes < 2 * truncation_k) {
    throw ConfigError(fmt::format("{} quadrature nodes cannot resolve degree {} (need >= {})", nodes,
                                  truncation_k, 2 * truncation_k));
  }
  return nodes;
}

void validate_expansion_request(int d, int truncation_k) {
  if (d < 3) throw DomainError(fmt::format("ultraspherical expansion needs d >= 3, got {}", d));
  if (truncation_k < kMinTruncation) {
    throw ConfigError(fmt::format("truncation K must be >= {}, got {}", kMinTruncation, truncation_k));
  }
}

double clamp_unit(double t) {
  if (!(std::abs(t) <= 1.0 + 1e-12)) {
    throw DomainError(fmt::format("kernel argument {} outside [-1, 1]", t));
  }
  return std::clamp(t, -1.0, 1.0);
}

double sum_series(const std::vector<double>& coeffs, double tau, double t) {
  if (coeffs.empty()) return 0.0;
  double cm2 = 1.0;
  double sum = coeffs[0];
  if (coeffs.size() == 1) return sum;
  double cm1 = 2.0 * tau * t;
  sum += coeffs[1] * cm1;
  for (std::size_t k = 2; k < coeffs.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double c = (2.0 * (kk + tau - 1.0) * t * cm1 - (kk + 2.0 * tau - 2.0) * cm2) / kk;
    sum += coeffs[k] * c;
    cm2 = cm1;
    cm1 = c;
  }
  return sum;
}

}  // namespace

namespace detail {

std::vector<double> expansion_nodes(int d, int truncation_k, int nodes) {
  validate_expansion_request(d, truncation_k);
  return cached_rule(resolve_nodes(truncation_k, nodes), 0.5 * (d - 2)).nodes;
}

std::vector<double> reconstruction_grid() {
  std::vector<double> grid(kReconstructionGridPoints);
  for (int i = 0; i < kReconstructionGridPoints; ++i) {
    grid[i] = -1.0 + 2.0 * i / (kReconstructionGridPoints - 1);
  }
  grid.back() = 1.0;
  return grid;
}

UltrasphericalExpansion expand_values(const std::vector<double>& gamma_at_nodes,
                                      const std::vector<double>& grid_values, int d,
                                      int truncation_k, int nodes) {
  validate_expansion_request(d, truncation_k);
  const int n = resolve_nodes(truncation_k, nodes);
  const double tau = 0.5 * (d - 2);
  const auto& rule = cached_rule(n, tau);
  if (gamma_at_nodes.size() != rule.nodes.size()) {
    throw ConfigError("expansion: sampled values do not match the quadrature rule");
  }

  const auto kmax = static_cast<std::size_t>(truncation_k);
  std::vector<double> moments(kmax + 1, 0.0);
  std::vector<double> basis(kmax + 1);
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double wg = rule.weights[i] * gamma_at_nodes[i];
    if (!std::isfinite(wg)) throw NumericError("expansion: non-finite activation value at a node");
    norm_sq += wg * gamma_at_nodes[i];
    gegenbauer_values(tau, rule.nodes[i], basis);
    for (std::size_t k = 0; k <= kmax; ++k) moments[k] += wg * basis[k];
  }

  UltrasphericalExpansion out;
  out.d = d;
  out.truncation_k = truncation_k;
  out.quadrature_nodes = n;
  out.coeffs_a.resize(kmax + 1);
  out.relative_mode_norm.resize(kmax + 1);
  const double norm = std::sqrt(norm_sq);
  std::vector<double> energy(kmax + 1);
  for (std::size_t k = 0; k <= kmax; ++k) {
    const double log_h = log_gegenbauer_norm(static_cast<int>(k), tau);
    out.coeffs_a[k] = moments[k] * std::exp(-log_h);
    const double mode = std::abs(moments[k]) * std::exp(-0.5 * log_h);
    out.relative_mode_norm[k] = norm > 0.0 ? mode / norm : 0.0;
    energy[k] = mode * mode;
  }

  const std::size_t tail = std::max<std::size_t>(1, (kmax + 1 + 9) / 10);
  double total = 0.0, tail_sum = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    total += energy[k];
    if (k + tail > kmax) tail_sum += energy[k];
  }
  out.tail_estimate = total > 0.0 ? tail_sum / total : 0.0;

  const auto grid = reconstruction_grid();
  if (grid_values.size() != grid.size()) {
    throw ConfigError("expansion: reconstruction grid values have the wrong size");
  }
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    err = std::max(err, std::abs(sum_series(out.coeffs_a, tau, grid[i]) - grid_values[i]));
  }
  out.reconstruction_error = err;
  return out;
}

}  // namespace detail

double UltrasphericalExpansion::evaluate(double t) const {
  return sum_series(coeffs_a, tau(), clamp_unit(t));
}

double KernelExpansion::evaluate(double t) const {
  return sum_series(coeffs_c, 0.5 * (d - 2), clamp_unit(t));
}

std::string_view to_string(KernelSource source) {
  switch (source) {
    case KernelSource::Quadrature: return "quadrature";
    case KernelSource::ClosedFormReLU: return "closed_form_relu";
    case KernelSource::ClosedFormNTK: return "closed_form_ntk";
  }
  return "unknown";
}

std::string_view to_string(PdStatus status) {
  switch (status) {
    case PdStatus::EmpiricallyStrictPd: return "EMPIRICALLY_STRICT_PD";
    case PdStatus::EvenPartPolynomial: return "EVEN_PART_POLYNOMIAL";
    case PdStatus::OddPartPolynomial: return "ODD_PART_POLYNOMIAL";
    case PdStatus::BothPartsPolynomial: return "BOTH_PARTS_POLYNOMIAL";
  }
  return "unknown";
}

double PopulationKernel::operator()(double t) const {
  if (const auto* exp = std::get_if<KernelExpansion>(&kernel)) return exp->evaluate(t);
  return std::get<ClosedFormKernel>(kernel) == ClosedFormKernel::ReLU ? relu_phi(t, d) : ntk_phi(t, d);
}

UltrasphericalExpansion expand(const Activation& act, int d, int truncation_k, int nodes) {
  if ((act.kind() == ActivationKind::Wendland0 || act.kind() == ActivationKind::Wendland2) &&
      act.dimension() != d) {
    throw ConfigError(fmt::format("activation configured for d = {} but expansion requested for d = {}",
                                  act.dimension(), d));
  }
  return expand_function([&act](double t) { return act(t); }, d, truncation_k, nodes);
}

double log_harmonic_dimension(int k, int d) {
  if (k == 0) return 0.0;
  // b_{k,d} = (2k + d - 2) / (k + d - 2) * C(k + d - 2, k)
  return std::log(2.0 * k + d - 2.0) - std::log(k + d - 2.0) + std::lgamma(k + d - 1.0) -
         std::lgamma(k + 1.0) - std::lgamma(d - 1.0);
}

KernelExpansion funk_hecke(const UltrasphericalExpansion& expansion) {
  const int d = expansion.d;
  KernelExpansion out;
  out.d = d;
  out.source = KernelSource::Quadrature;
  out.coeffs_c.resize(expansion.coeffs_a.size());
  for (std::size_t k = 0; k < expansion.coeffs_a.size(); ++k) {
    const double a = expansion.coeffs_a[k];
    if (a == 0.0) {
      out.coeffs_c[k] = 0.0;
      continue;
    }
    const int kk = static_cast<int>(k);
    const double log_ratio = std::lgamma(d + kk - 2.0) - std::lgamma(d - 2.0) - std::lgamma(kk + 1.0);
    const double log_c = 2.0 * std::log(std::abs(a)) - log_harmonic_dimension(kk, d) + log_ratio;
    const double c = std::exp(log_c);
    if (!std::isfinite(c)) {
      throw NumericError(fmt::format("Funk-Hecke coefficient c_{} is not finite", k));
    }
    out.coeffs_c[k] = c;
  }
  return out;
}

double relu_phi(double t, int d) {
  if (d < 3) throw DomainError("relu_phi requires d >= 3");
  t = clamp_unit(t);
  const double theta = std::acos(t);
  return (std::sin(theta) + (0.5 * std::numbers::pi - theta) * t) / (2.0 * d * std::numbers::pi) +
         t / (4.0 * d);
}

double ntk_phi(double t, int d) {
  if (d < 3) throw DomainError("ntk_phi requires d >= 3");
  t = clamp_unit(t);
  return t * (std::numbers::pi - std::acos(t)) / (2.0 * d * std::numbers::pi);
}

Eigen::MatrixXd population_kernel_matrix(const Eigen::MatrixXd& points, const PopulationKernel& kernel) {
  if (points.cols() != kernel.d) {
    throw ConfigError(fmt::format("kernel built for d = {} but points have dimension {}", kernel.d,
                                  points.cols()));
  }
  return kernels::parallel::population_matrix(points, [&kernel](double t) { return kernel(t); });
}

PdCertificate certify(const UltrasphericalExpansion& expansion, double tol, int census_threshold) {
  if (expansion.truncation_k < kMinCertifyTruncation) {
    throw ConfigError(fmt::format("certify needs K >= {}, got {}", kMinCertifyTruncation,
                                  expansion.truncation_k));
  }
  PdCertificate cert;
  cert.census_threshold = census_threshold;
  for (std::size_t k = 0; k < expansion.relative_mode_norm.size(); ++k) {
    if (expansion.relative_mode_norm[k] > tol) {
      (k % 2 ? cert.odd_count_above_tol : cert.even_count_above_tol) += 1;
    }
  }
  const bool odd_rich = cert.odd_count_above_tol >= census_threshold;
  const bool even_rich = cert.even_count_above_tol >= census_threshold;
  if (odd_rich && even_rich) {
    cert.status = PdStatus::EmpiricallyStrictPd;
  } else if (even_rich) {
    cert.status = PdStatus::OddPartPolynomial;
  } else if (odd_rich) {
    cert.status = PdStatus::EvenPartPolynomial;
  } else {
    cert.status = PdStatus::BothPartsPolynomial;
  }
  return cert;
}

}  // namespace randfeat
