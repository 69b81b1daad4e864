#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace randfeat {

/// n points on the unit sphere in R^d (one per row) with labels.
struct Dataset {
  Eigen::MatrixXd points;
  Eigen::VectorXd labels;
  std::string name;
  bool allow_duplicates = false;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dimension() const { return points.cols(); }

  /// Unit norms to 1e-12 and, unless allow_duplicates, minimum pairwise
  /// distance > 1e-9. Throws DomainError naming the offending rows.
  void validate() const;
};

inline constexpr double kUnitNormTolerance = 1e-12;
inline constexpr double kDistinctTolerance = 1e-9;

/// Null vector of the ReLU feature matrix on the 8-point set.
inline constexpr std::array<double, 8> kBadSetNullVector{1, -1, -1, -1, 1, 1, 1, -1};
/// Null vector of the indicator matrix 1[w^T x_j > 0] on the 8-point set.
inline constexpr std::array<double, 8> kBadSetIndicatorNullVector{1, 0, 0, -1, -1, 0, 0, 1};

Eigen::VectorXd bad_set_null_vector();
Eigen::VectorXd bad_set_indicator_null_vector();

/// The eight points (+-s, +-s, +-s, 0, ..., 0), s = 1/sqrt(3), in the fixed
/// order x_1 = (s,s,s), x_2 = (-s,s,s), x_3 = (s,-s,s), x_4 = (s,s,-s),
/// x_5 = (-s,-s,s), x_6 = (-s,s,-s), x_7 = (s,-s,-s), x_8 = (-s,-s,-s).
Dataset bad_point_set(int d);

/// Row indices (in bad-set order) at which the eight bad points occur, if all do.
std::optional<std::array<Eigen::Index, 8>> find_bad_point_set(const Eigen::MatrixXd& points);

/// n i.i.d. uniform points on S^{d-1} (normalized Gaussian vectors).
Dataset uniform_sphere(int n, int d, std::uint64_t seed);

/// Uniform points on S^{d-1} labelled y_i = x_i^T e (e = all ones).
Dataset synthetic1(std::uint64_t seed, int n = 500, int d = 10);

/// The eight bad points followed by 92 uniform points on S^2. The bad points
/// and the first 42 uniform points are labelled +1, the rest -1.
Dataset synthetic2(std::uint64_t seed);

struct IngestOptions {
  std::string label_col = "y";
  bool standardize = false;
  std::optional<int> pca_dims;
  bool allow_duplicates = false;
};

/// Feature pipeline: optional per-column standard score, optional centred PCA
/// onto the leading `pca_dims` components, then projection to the sphere.
/// `feature_names` is used in error messages (may be empty).
Dataset prepare_features(Eigen::MatrixXd raw, Eigen::VectorXd labels, const IngestOptions& options,
                         std::string name, const std::vector<std::string>& feature_names = {});

/// Reads a CSV with a header row; the label column is `options.label_col`,
/// every other column is a feature.
Dataset ingest_csv(const std::string& path, const IngestOptions& options);

/// 97 x 8 correlated clinical-style features, standardized and projected to S^7.
Dataset prostate_standin(std::uint64_t seed);

/// 500 two-class 784-pixel images (250 per class, labels +-1), PCA to 10
/// components and projected to S^9.
Dataset fashion_standin(std::uint64_t seed);

/// CSV with columns x_0..x_{d-1},y.
void write_csv(const Dataset& data, std::ostream& out);
void write_csv(const Dataset& data, const std::string& path);

double min_pairwise_distance(const Eigen::MatrixXd& points);

}  // namespace randfeat
