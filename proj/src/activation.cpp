#include "randfeat/activation.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "randfeat/csv.hpp"
#include "randfeat/errors.hpp"

namespace randfeat {
namespace {

constexpr int kDenseGridPoints = 100001;

double int_pow(double base, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

double swish_unit(double z) { return z / (1.0 + std::exp(-z)); }

void require_dimension(int d, std::string_view kind) {
  if (d < 3) throw DomainError(fmt::format("{} activation requires d >= 3, got {}", kind, d));
}

void require_zeta(double zeta) {
  if (!(zeta > 0.0) || !std::isfinite(zeta)) {
    throw DomainError(fmt::format("Wendland width zeta must be positive, got {}", zeta));
  }
}

double golden_max_abs(const Activation& act, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = std::abs(act(c));
  double fd = std::abs(act(d));
  for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = std::abs(act(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = std::abs(act(d));
    }
  }
  return std::max(fc, fd);
}

double parse_zeta_option(std::string_view opt) {
  constexpr std::string_view kPrefix = "zeta=";
  if (opt.substr(0, kPrefix.size()) != kPrefix) {
    throw ConfigError(fmt::format("unknown activation option '{}'", opt));
  }
  const auto value = opt.substr(kPrefix.size());
  double zeta = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), zeta);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(fmt::format("cannot parse zeta value '{}'", value));
  }
  return zeta;
}

}  // namespace

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::Swish: return "swish";
    case ActivationKind::Wendland0: return "wendland0";
    case ActivationKind::Wendland2: return "wendland2";
    case ActivationKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

Activation Activation::relu() {
  Activation a;
  a.kind_ = ActivationKind::ReLU;
  a.finalize();
  return a;
}

Activation Activation::swish() {
  Activation a;
  a.kind_ = ActivationKind::Swish;
  a.finalize();
  return a;
}

Activation Activation::wendland0(int d, double zeta) {
  require_dimension(d, "wendland0");
  require_zeta(zeta);
  Activation a;
  a.kind_ = ActivationKind::Wendland0;
  a.d_ = d;
  a.zeta_ = zeta;
  a.ell_ = d / 2 + 1;
  a.finalize();
  return a;
}

Activation Activation::wendland2(int d, double zeta) {
  require_dimension(d, "wendland2");
  require_zeta(zeta);
  Activation a;
  a.kind_ = ActivationKind::Wendland2;
  a.d_ = d;
  a.zeta_ = zeta;
  a.ell_ = d / 2 + 3;
  a.finalize();
  return a;
}

Activation Activation::tabulated(std::vector<double> z, std::vector<double> g) {
  if (z.size() != g.size()) throw ConfigError("tabulated activation: z and gamma sizes differ");
  if (z.size() < kMinTableSize) {
    throw ConfigError(fmt::format("tabulated activation needs >= {} grid points, got {}",
                                  kMinTableSize, z.size()));
  }
  if (z.front() != -1.0 || z.back() != 1.0) {
    throw ConfigError("tabulated activation grid must start at -1 and end at 1");
  }
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (!(z[i] > z[i - 1])) throw ConfigError("tabulated activation grid must be strictly increasing");
  }
  for (double v : g) {
    if (!std::isfinite(v)) throw ConfigError("tabulated activation values must be finite");
  }
  Activation a;
  a.kind_ = ActivationKind::Tabulated;
  a.table_z_ = std::move(z);
  a.table_g_ = std::move(g);
  a.finalize();
  return a;
}

Activation Activation::tabulated_from_csv(const std::string& path) {
  const auto table = csv::read(path);
  if (table.header.size() < 2) throw ConfigError("tabulated activation CSV needs two columns");
  std::vector<double> z, g;
  z.reserve(table.rows.size());
  g.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    z.push_back(row[0]);
    g.push_back(row[1]);
  }
  auto act = tabulated(std::move(z), std::move(g));
  act.table_path_ = path;
  return act;
}

Activation Activation::parse(std::string_view spec, int d) {
  constexpr std::string_view kTab = "tabulated:";
  if (spec.substr(0, kTab.size()) == kTab) {
    auto path = spec.substr(kTab.size());
    if (path.find(":zeta=") != std::string_view::npos) {
      throw ConfigError("zeta is only meaningful for Wendland activations");
    }
    if (path.empty()) throw ConfigError("tabulated activation requires a path");
    return tabulated_from_csv(std::string(path));
  }
  std::string_view name = spec;
  double zeta = kDefaultZeta;
  bool has_zeta = false;
  if (const auto colon = spec.find(':'); colon != std::string_view::npos) {
    name = spec.substr(0, colon);
    zeta = parse_zeta_option(spec.substr(colon + 1));
    has_zeta = true;
  }
  if (name == "wendland0") return wendland0(d, zeta);
  if (name == "wendland2") return wendland2(d, zeta);
  if (has_zeta) throw ConfigError("zeta is only meaningful for Wendland activations");
  if (name == "relu") return relu();
  if (name == "swish") return swish();
  throw ConfigError(fmt::format("unknown activation '{}'", spec));
}

void Activation::finalize() {
  bound_c_ = compute_bound_c(*this);
  lipschitz_l_ = compute_lipschitz_l(*this);
}

double Activation::wendland_profile(double r) const {
  if (r > 1.0) return 0.0;
  const double u = 1.0 - r;
  if (kind_ == ActivationKind::Wendland0) return int_pow(u, ell_);
  const double l = ell_;
  return int_pow(u, ell_ + 2) * ((l * l + 4.0 * l + 3.0) * r * r + (3.0 * l + 6.0) * r + 3.0);
}

double Activation::eval_unit(double z) const {
  switch (kind_) {
    case ActivationKind::ReLU: return z > 0.0 ? z : 0.0;
    case ActivationKind::Swish: return swish_unit(z);
    case ActivationKind::Wendland0:
    case ActivationKind::Wendland2: {
      const double r = std::sqrt(std::max(2.0 - 2.0 * z, 0.0)) / zeta_;
      return wendland_profile(r);
    }
    case ActivationKind::Tabulated: {
      if (z <= table_z_.front()) return table_g_.front();
      if (z >= table_z_.back()) return table_g_.back();
      const auto it = std::upper_bound(table_z_.begin(), table_z_.end(), z);
      const auto hi = static_cast<std::size_t>(it - table_z_.begin());
      const auto lo = hi - 1;
      const double w = (z - table_z_[lo]) / (table_z_[hi] - table_z_[lo]);
      return table_g_[lo] + w * (table_g_[hi] - table_g_[lo]);
    }
  }
  return 0.0;
}

double Activation::operator()(double z) const {
  if (!(z >= -1.0 - kDomainTolerance && z <= 1.0 + kDomainTolerance)) {
    throw DomainError(fmt::format("activation argument {} outside [-1, 1]", z));
  }
  return scale_ * eval_unit(std::clamp(z, -1.0, 1.0));
}

Activation Activation::scaled(double p) const {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw DomainError(fmt::format("activation scale must be positive, got {}", p));
  }
  Activation out = *this;
  out.scale_ = scale_ * p;
  out.bound_c_ = bound_c_ * p;
  out.lipschitz_l_ = lipschitz_l_ * p;
  return out;
}

std::string Activation::name() const { return std::string(to_string(kind_)); }

std::string Activation::spec() const {
  switch (kind_) {
    case ActivationKind::Wendland0:
    case ActivationKind::Wendland2:
      if (zeta_ == kDefaultZeta) return name();
      return fmt::format("{}:zeta={}", name(), zeta_);
    case ActivationKind::Tabulated:
      return table_path_.empty() ? name() : "tabulated:" + table_path_;
    default:
      return name();
  }
}

double compute_bound_c(const Activation& act) {
  switch (act.kind()) {
    case ActivationKind::ReLU: return act.scale();
    case ActivationKind::Swish:
      // Monotone on [-1, 1]; the larger endpoint magnitude is at z = 1.
      return act.scale() * std::max(std::abs(swish_unit(1.0)), std::abs(swish_unit(-1.0)));
    default: break;
  }
  const double h = 2.0 / (kDenseGridPoints - 1);
  double best = 0.0;
  int best_i = 0;
  for (int i = 0; i < kDenseGridPoints; ++i) {
    const double v = std::abs(act(-1.0 + h * i));
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (act.kind() == ActivationKind::Tabulated) {
    for (double g : act.table_g()) best = std::max(best, act.scale() * std::abs(g));
    return best;
  }
  const double lo = std::max(-1.0, -1.0 + h * (best_i - 1));
  const double hi = std::min(1.0, -1.0 + h * (best_i + 1));
  best = std::max({best, golden_max_abs(act, lo, hi), std::abs(act(-1.0)), std::abs(act(1.0))});
  return best;
}

double compute_lipschitz_l(const Activation& act) {
  if (act.kind() == ActivationKind::ReLU) return act.scale();
  if (act.kind() == ActivationKind::Tabulated) {
    const auto& z = act.table_z();
    const auto& g = act.table_g();
    double best = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) {
      best = std::max(best, std::abs(g[i] - g[i - 1]) / (z[i] - z[i - 1]));
    }
    return act.scale() * best;
  }
  const double h = 2.0 / (kDenseGridPoints - 1);
  double best = 0.0;
  double prev = act(-1.0);
  for (int i = 1; i < kDenseGridPoints; ++i) {
    const double z = i + 1 == kDenseGridPoints ? 1.0 : -1.0 + h * i;
    const double cur = act(z);
    best = std::max(best, std::abs(cur - prev) / h);
    prev = cur;
  }
  return best;
}

}  // namespace randfeat
