#include "randfeat/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "randfeat/csv.hpp"
#include "randfeat/errors.hpp"
#include "randfeat/rng.hpp"

namespace randfeat {
namespace {

constexpr std::array<std::array<int, 3>, 8> kBadSigns{{
    {1, 1, 1}, {-1, 1, 1}, {1, -1, 1}, {1, 1, -1},
    {-1, -1, 1}, {-1, 1, -1}, {1, -1, -1}, {-1, -1, -1},
}};

Eigen::MatrixXd sample_sphere_rows(int n, int d, GaussianStream& g) {
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (int j = 0; j < d; ++j) x(i, j) = g();
      norm = x.row(i).norm();
    } while (norm == 0.0);
    x.row(i) /= norm;
  }
  return x;
}

std::string feature_label(const std::vector<std::string>& names, Eigen::Index j) {
  if (static_cast<std::size_t>(j) < names.size()) return fmt::format("'{}'", names[j]);
  return fmt::format("{}", j);
}

}  // namespace

void Dataset::validate() const {
  if (labels.size() != points.rows()) {
    throw ConfigError(fmt::format("dataset '{}': {} labels for {} points", name, labels.size(),
                                  points.rows()));
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double norm = points.row(i).norm();
    if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
      throw DomainError(fmt::format("dataset '{}': point {} has norm {:.17g}", name, i, norm));
    }
  }
  if (allow_duplicates) return;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
      if ((points.row(i) - points.row(j)).norm() <= kDistinctTolerance) {
        throw DomainError(fmt::format("dataset '{}': points {} and {} coincide", name, i, j));
      }
    }
  }
}

Eigen::VectorXd bad_set_null_vector() {
  return Eigen::Map<const Eigen::VectorXd>(kBadSetNullVector.data(), 8);
}

Eigen::VectorXd bad_set_indicator_null_vector() {
  return Eigen::Map<const Eigen::VectorXd>(kBadSetIndicatorNullVector.data(), 8);
}

Dataset bad_point_set(int d) {
  if (d < 3) throw DomainError(fmt::format("bad point set needs d >= 3, got {}", d));
  const double s = 1.0 / std::sqrt(3.0);
  Dataset out;
  out.points = Eigen::MatrixXd::Zero(8, d);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 3; ++j) out.points(i, j) = kBadSigns[i][j] * s;
  }
  out.labels = Eigen::VectorXd::Zero(8);
  out.name = fmt::format("bad-set(d={})", d);
  return out;
}

std::optional<std::array<Eigen::Index, 8>> find_bad_point_set(const Eigen::MatrixXd& points) {
  if (points.cols() < 3) return std::nullopt;
  const auto bad = bad_point_set(static_cast<int>(points.cols()));
  std::array<Eigen::Index, 8> where{};
  for (int b = 0; b < 8; ++b) {
    bool found = false;
    for (Eigen::Index i = 0; i < points.rows() && !found; ++i) {
      if ((points.row(i) - bad.points.row(b)).norm() <= 1e-12) {
        where[b] = i;
        found = true;
      }
    }
    if (!found) return std::nullopt;
  }
  return where;
}

Dataset uniform_sphere(int n, int d, std::uint64_t seed) {
  if (n < 1) throw DomainError("uniform_sphere needs n >= 1");
  if (d < 2) throw DomainError("uniform_sphere needs d >= 2");
  GaussianStream g(seed);
  Dataset out;
  out.points = sample_sphere_rows(n, d, g);
  out.labels = Eigen::VectorXd::Zero(n);
  out.name = fmt::format("uniform(n={},d={},seed={})", n, d, seed);
  return out;
}

Dataset synthetic1(std::uint64_t seed, int n, int d) {
  auto out = uniform_sphere(n, d, seed);
  out.labels = out.points.rowwise().sum();
  out.name = fmt::format("synthetic1(n={},d={},seed={})", n, d, seed);
  return out;
}

Dataset synthetic2(std::uint64_t seed) {
  constexpr int kUniform = 92;
  constexpr int kUniformPositive = 42;
  const auto bad = bad_point_set(3);
  GaussianStream g(seed);
  const auto uniform = sample_sphere_rows(kUniform, 3, g);

  Dataset out;
  out.points.resize(8 + kUniform, 3);
  out.points.topRows(8) = bad.points;
  out.points.bottomRows(kUniform) = uniform;
  out.labels.resize(8 + kUniform);
  out.labels.head(8).setOnes();
  for (int i = 0; i < kUniform; ++i) out.labels(8 + i) = i < kUniformPositive ? 1.0 : -1.0;
  out.name = fmt::format("synthetic2(seed={})", seed);
  return out;
}

Dataset prepare_features(Eigen::MatrixXd raw, Eigen::VectorXd labels, const IngestOptions& options,
                         std::string name, const std::vector<std::string>& feature_names) {
  const Eigen::Index n = raw.rows();
  if (n < 1 || raw.cols() < 1) throw ConfigError("feature pipeline: empty input");
  if (labels.size() != n) throw ConfigError("feature pipeline: label count differs from row count");

  if (options.standardize) {
    if (n < 2) throw ConfigError("standardization needs at least two rows");
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      const double mean = raw.col(j).mean();
      raw.col(j).array() -= mean;
      const double sd = std::sqrt(raw.col(j).squaredNorm() / static_cast<double>(n - 1));
      if (!(sd > 0.0)) {
        throw DomainError(fmt::format("feature column {} has zero variance; cannot standardize",
                                      feature_label(feature_names, j)));
      }
      raw.col(j) /= sd;
    }
  }

  if (options.pca_dims) {
    const int k = *options.pca_dims;
    if (k < 1 || k > raw.cols()) {
      throw ConfigError(fmt::format("pca_dims must be in [1, {}], got {}", raw.cols(), k));
    }
    if (n < 2) throw ConfigError("PCA needs at least two rows");
    const Eigen::RowVectorXd mean = raw.colwise().mean();
    raw.rowwise() -= mean;
    const Eigen::MatrixXd cov = (raw.transpose() * raw) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericError("PCA eigendecomposition failed");
    Eigen::MatrixXd basis(raw.cols(), k);
    for (int c = 0; c < k; ++c) {
      Eigen::VectorXd v = eig.eigenvectors().col(raw.cols() - 1 - c);
      Eigen::Index arg;
      v.cwiseAbs().maxCoeff(&arg);
      if (v(arg) < 0.0) v = -v;
      basis.col(c) = v;
    }
    raw = raw * basis;
  }

  const Eigen::VectorXd norms = raw.rowwise().norm();
  const double scale = norms.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(norms(i))) {
      throw NumericError(fmt::format("row {} has non-finite entries", i + 1));
    }
    if (!(norms(i) > 1e-12 * scale)) {
      throw DomainError(fmt::format("row {} has zero norm and cannot be projected to the sphere", i + 1));
    }
    if (std::abs(norms(i) - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) raw.row(i) /= norms(i);
  }

  Dataset out;
  out.points = std::move(raw);
  out.labels = std::move(labels);
  out.name = std::move(name);
  out.allow_duplicates = options.allow_duplicates;
  out.validate();
  return out;
}

Dataset ingest_csv(const std::string& path, const IngestOptions& options) {
  const auto table = csv::read(path);
  const auto label_col = table.column(options.label_col);
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto d = static_cast<Eigen::Index>(table.header.size()) - 1;
  if (n == 0) throw ParseError(fmt::format("'{}' has no data rows", path), 2, 0);
  if (d < 1) throw ConfigError(fmt::format("'{}' has no feature columns", path));
  Eigen::MatrixXd raw(n, d);
  Eigen::VectorXd labels(n);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j != label_col) names.push_back(table.header[j]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (j == label_col) {
        labels(i) = table.rows[i][j];
      } else {
        raw(i, c++) = table.rows[i][j];
      }
    }
  }
  return prepare_features(std::move(raw), std::move(labels), options, path, names);
}

Dataset prostate_standin(std::uint64_t seed) {
  constexpr int kRows = 97;
  constexpr int kFeatures = 8;
  GaussianStream g(seed);
  // Correlated features with heterogeneous scales and offsets.
  Eigen::MatrixXd mixing(kFeatures, kFeatures);
  for (int i = 0; i < kFeatures; ++i)
    for (int j = 0; j < kFeatures; ++j) mixing(i, j) = (i == j ? 1.0 : 0.35 * g());
  const Eigen::Array<double, 1, kFeatures> scales{1.3, 3.6, 7.5, 1.4, 0.4, 1.4, 0.7, 28.0};
  const Eigen::Array<double, 1, kFeatures> offsets{1.35, 3.6, 63.9, 0.1, 0.2, -0.2, 6.8, 24.4};
  Eigen::MatrixXd latent(kRows, kFeatures);
  for (int i = 0; i < kRows; ++i)
    for (int j = 0; j < kFeatures; ++j) latent(i, j) = g();
  Eigen::MatrixXd raw = latent * mixing;
  raw.array().rowwise() *= scales;
  raw.array().rowwise() += offsets;
  Eigen::VectorXd weights(kFeatures);
  for (int j = 0; j < kFeatures; ++j) weights(j) = g();
  Eigen::VectorXd labels = latent * weights * 0.5;
  for (int i = 0; i < kRows; ++i) labels(i) += 2.5 + 0.3 * g();

  IngestOptions opts;
  opts.standardize = true;
  return prepare_features(std::move(raw), std::move(labels), opts,
                          fmt::format("prostate-standin(seed={})", seed));
}

Dataset fashion_standin(std::uint64_t seed) {
  constexpr int kPerClass = 250;
  constexpr int kSide = 28;
  constexpr int kPixels = kSide * kSide;
  GaussianStream g(seed);
  // Two smooth class prototypes; images are prototypes plus pixel noise, clipped to [0, 1].
  Eigen::MatrixXd protos(2, kPixels);
  for (int c = 0; c < 2; ++c) {
    const double cx = 9.0 + 10.0 * c, cy = 14.0, sx = 4.0 + 4.0 * c, sy = 9.0 - 4.0 * c;
    for (int r = 0; r < kSide; ++r)
      for (int q = 0; q < kSide; ++q) {
        const double dx = (q - cx) / sx, dy = (r - cy) / sy;
        protos(c, r * kSide + q) = std::exp(-0.5 * (dx * dx + dy * dy));
      }
  }
  Eigen::MatrixXd raw(2 * kPerClass, kPixels);
  Eigen::VectorXd labels(2 * kPerClass);
  for (int i = 0; i < 2 * kPerClass; ++i) {
    const int c = i < kPerClass ? 0 : 1;
    const double brightness = 0.8 + 0.1 * g();
    for (int p = 0; p < kPixels; ++p) {
      raw(i, p) = std::clamp(brightness * protos(c, p) + 0.15 * g(), 0.0, 1.0);
    }
    labels(i) = c == 0 ? 1.0 : -1.0;
  }
  IngestOptions opts;
  opts.pca_dims = 10;
  return prepare_features(std::move(raw), std::move(labels), opts,
                          fmt::format("fashion-standin(seed={})", seed));
}

void write_csv(const Dataset& data, std::ostream& out) {
  std::vector<std::string> cells;
  for (Eigen::Index j = 0; j < data.dimension(); ++j) cells.push_back(fmt::format("x_{}", j));
  cells.emplace_back("y");
  csv::write_row(out, cells);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    cells.clear();
    for (Eigen::Index j = 0; j < data.dimension(); ++j) cells.push_back(csv::format(data.points(i, j)));
    cells.push_back(csv::format(data.labels(i)));
    csv::write_row(out, cells);
  }
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  write_csv(data, out);
}

double min_pairwise_distance(const Eigen::MatrixXd& points) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = i + 1; j < points.rows(); ++j)
      best = std::min(best, (points.row(i) - points.row(j)).norm());
  return best;
}

}  // namespace randfeat
