#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace randfeat {

enum class ActivationKind { ReLU, Swish, Wendland0, Wendland2, Tabulated };

std::string_view to_string(ActivationKind kind);

/// A scalar nonlinearity gamma on [-1, 1] together with its bound C and
/// Lipschitz constant L. Values are immutable after construction.
///
/// Wendland kinds depend on the ambient dimension d (through the exponent
/// l = floor(d/2) + 1 or floor(d/2) + 3) and on the width zeta; their
/// argument is r = sqrt(2 - 2z) / zeta and the support is r <= 1.
class Activation {
 public:
  static constexpr double kDefaultZeta = std::numbers::sqrt2;
  static constexpr double kDomainTolerance = 1e-12;
  static constexpr std::size_t kMinTableSize = 256;

  static Activation relu();
  static Activation swish();
  static Activation wendland0(int d, double zeta = kDefaultZeta);
  static Activation wendland2(int d, double zeta = kDefaultZeta);
  /// Piecewise-linear interpolant through (z_i, g_i). The grid must be
  /// strictly increasing, start at -1, end at 1 and hold >= 256 points.
  static Activation tabulated(std::vector<double> z, std::vector<double> g);
  /// Reads a two-column CSV (header row, then z,gamma rows).
  static Activation tabulated_from_csv(const std::string& path);

  /// Parses "relu" | "swish" | "wendland0" | "wendland2" | "tabulated:<path>",
  /// each optionally followed by ":zeta=<float>" (Wendland kinds only).
  /// `d` is used by the Wendland kinds.
  static Activation parse(std::string_view spec, int d);

  /// gamma(z) for z in [-1, 1]. Arguments within 1e-12 of the interval are
  /// clamped; anything further out throws DomainError.
  double operator()(double z) const;

  /// gamma on an arbitrary real argument (Gaussian weights). Wendland kinds
  /// clamp 2 - 2z at zero, tabulated kinds extend by their endpoint values.
  double eval_raw(double z) const {
    return scale_ * eval_unit(z);
  }

  Activation scaled(double p) const;

  ActivationKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return d_; }
  double zeta() const noexcept { return zeta_; }
  double scale() const noexcept { return scale_; }
  int wendland_exponent() const noexcept { return ell_; }
  double bound_c() const noexcept { return bound_c_; }
  double lipschitz_l() const noexcept { return lipschitz_l_; }
  const std::vector<double>& table_z() const noexcept { return table_z_; }
  const std::vector<double>& table_g() const noexcept { return table_g_; }
  /// Short identifier, e.g. "relu", "wendland0", "tabulated".
  std::string name() const;
  /// Round-trippable spec string accepted by parse().
  std::string spec() const;

 private:
  Activation() = default;
  void finalize();
  double eval_unit(double z) const;
  double wendland_profile(double r) const;

  ActivationKind kind_{ActivationKind::ReLU};
  int d_{0};
  int ell_{0};
  double zeta_{kDefaultZeta};
  double scale_{1.0};
  double bound_c_{1.0};
  double lipschitz_l_{1.0};
  std::vector<double> table_z_;
  std::vector<double> table_g_;
  std::string table_path_;
};

/// max |gamma| on [-1, 1]: closed form for ReLU/swish, dense grid (10^5 + 1
/// points plus table nodes) refined by golden-section search otherwise.
double compute_bound_c(const Activation& act);

/// Largest difference quotient of gamma over the dense grid.
double compute_lipschitz_l(const Activation& act);

}  // namespace randfeat
