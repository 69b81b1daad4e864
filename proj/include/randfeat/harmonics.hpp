#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "randfeat/activation.hpp"

namespace randfeat {

/// gamma(t) ~ sum_k a_k C_k^{((d-2)/2)}(t), truncated at degree K.
struct UltrasphericalExpansion {
  int d = 3;
  int truncation_k = 0;
  std::vector<double> coeffs_a;
  /// sqrt(h_k) * |a_k| / ||gamma||_w : share of the weighted L2 norm carried by mode k.
  std::vector<double> relative_mode_norm;
  /// Fraction of the captured energy sum_k a_k^2 h_k sitting in the last 10% of modes.
  double tail_estimate = 0.0;
  /// max over a 1024-point grid of |sum_k a_k C_k(z) - gamma(z)|.
  double reconstruction_error = 0.0;
  int quadrature_nodes = 0;

  static constexpr double kWarnReconstruction = 1e-4;
  bool reconstruction_warning() const { return reconstruction_error > kWarnReconstruction; }
  double tau() const { return 0.5 * (d - 2); }
  double evaluate(double t) const;
};

enum class KernelSource { Quadrature, ClosedFormReLU, ClosedFormNTK };

std::string_view to_string(KernelSource source);

/// phi(t) ~ sum_k c_k C_k^{((d-2)/2)}(t), the zonal kernel induced by gamma.
struct KernelExpansion {
  int d = 3;
  std::vector<double> coeffs_c;
  KernelSource source = KernelSource::Quadrature;

  double evaluate(double t) const;
};

enum class ClosedFormKernel { ReLU, NTK };

/// A population kernel: either a (truncated) Funk-Hecke image or one of the
/// two closed forms. Dimension d is carried by both.
struct PopulationKernel {
  std::variant<KernelExpansion, ClosedFormKernel> kernel;
  int d = 3;

  static PopulationKernel from_expansion(KernelExpansion k) {
    const int d = k.d;
    return {std::move(k), d};
  }
  static PopulationKernel closed_form(ClosedFormKernel k, int d) { return {k, d}; }

  double operator()(double t) const;
};

enum class PdStatus {
  EmpiricallyStrictPd,
  EvenPartPolynomial,
  OddPartPolynomial,
  BothPartsPolynomial
};

std::string_view to_string(PdStatus status);

struct PdCertificate {
  PdStatus status = PdStatus::BothPartsPolynomial;
  int odd_count_above_tol = 0;
  int even_count_above_tol = 0;
  int census_threshold = 5;
};

constexpr int kDefaultTruncation = 500;
constexpr int kMinTruncation = 16;
constexpr int kMinCertifyTruncation = 64;
constexpr int kMinQuadratureNodes = 1024;

/// Coefficients by Gauss-Gegenbauer quadrature with max(2K, 1024) nodes
/// (or `nodes` if given; fewer than 2K throws ConfigError).
UltrasphericalExpansion expand(const Activation& act, int d, int truncation_k = kDefaultTruncation,
                               int nodes = 0);

/// Same, for an arbitrary callable on [-1, 1].
template <class F>
UltrasphericalExpansion expand_function(F&& gamma, int d, int truncation_k, int nodes = 0);

/// c_k = a_k^2 / b_{k,d} * Gamma(d+k-2) / (Gamma(d-2) Gamma(k+1)), evaluated in log space.
KernelExpansion funk_hecke(const UltrasphericalExpansion& expansion);

/// Dimension of the degree-k spherical harmonics on S^{d-1}:
/// b_{0,d} = 1, b_{1,d} = d, b_{k,d} = C(d+k-1, k) - C(d+k-3, k-2).
double log_harmonic_dimension(int k, int d);

/// [sin(arccos t) + (pi/2 - arccos t) t] / (2 d pi) + t / (4 d)
double relu_phi(double t, int d);

/// t (pi - arccos t) / (2 d pi)
double ntk_phi(double t, int d);

/// H_ij = phi(x_i^T x_j) for rows x_i of `points`; inner products clamped to
/// [-1, 1] when within 1e-12 of it. Symmetric by construction.
Eigen::MatrixXd population_kernel_matrix(const Eigen::MatrixXd& points, const PopulationKernel& kernel);

/// Census of expansion modes above `tol` in each parity class. Modes are
/// measured by relative_mode_norm (scale and normalization free).
PdCertificate certify(const UltrasphericalExpansion& expansion, double tol = 1e-8,
                      int census_threshold = 5);

// ---------------------------------------------------------------------------

namespace detail {
UltrasphericalExpansion expand_values(const std::vector<double>& gamma_at_nodes,
                                      const std::vector<double>& grid_values, int d,
                                      int truncation_k, int nodes);
std::vector<double> expansion_nodes(int d, int truncation_k, int nodes);
std::vector<double> reconstruction_grid();
}  // namespace detail

template <class F>
UltrasphericalExpansion expand_function(F&& gamma, int d, int truncation_k, int nodes) {
  const auto t = detail::expansion_nodes(d, truncation_k, nodes);
  std::vector<double> values(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) values[i] = gamma(t[i]);
  const auto grid = detail::reconstruction_grid();
  std::vector<double> grid_values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) grid_values[i] = gamma(grid[i]);
  return detail::expand_values(values, grid_values, d, truncation_k, nodes);
}

}  // namespace randfeat
