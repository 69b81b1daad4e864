#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "randfeat/data.hpp"
#include "randfeat/training.hpp"

namespace randfeat::repro {

inline constexpr int kSchemaVersion = 1;

/// Where a pipeline's points come from: a named generator or a CSV file.
struct DatasetSpec {
  std::string kind = "synthetic1";  // uniform | bad-set | synthetic1 | synthetic2 | prostate | fashion | file
  std::string path;                 // kind == file
  int n = 0;                        // 0: generator default
  int d = 0;
  std::uint64_t seed = 0;
  std::string label_col = "y";
  bool standardize = false;
  std::optional<int> pca_dims;
};

Dataset load_dataset(const DatasetSpec& spec);
/// Human-readable provenance notes (e.g. stand-in disclaimers) for metadata.
std::vector<std::string> dataset_notes(const DatasetSpec& spec);

struct Figure1Options {
  DatasetSpec data;
  std::vector<std::string> activations{"wendland0", "relu", "swish"};
  std::vector<double> width_multiples{1, 2, 5, 10, 20, 50, 100};
  int trials = 20;
  std::uint64_t seed = 0;
};

/// kappa(H_hat) against width. Writes figure1_sweep.csv and figure1_summary.csv.
void figure1(const Figure1Options& opt, const std::filesystem::path& out);

struct Figure2Options {
  DatasetSpec data;
  std::vector<std::string> activations{"relu", "wendland0", "wendland2"};
  double width_multiple = 10.0;
  std::int64_t max_iters = 100000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

/// Last-layer gradient descent residuals. Writes figure2_train.csv and figure2_summary.csv.
void figure2(const Figure2Options& opt, const std::filesystem::path& out);

struct Figure3Options {
  DatasetSpec data;
  std::vector<std::string> activations{"relu", "wendland0"};
  double width_multiple = 10.0;
  std::vector<std::int64_t> ks{1, 10, 100, 1000, 10000};
  int truncation = 500;
  std::uint64_t seed = 0;
};

/// Landweber filter factors and empirical vs population spectra.
/// Writes figure3_filters.csv and figure3_spectrum.csv.
void figure3(const Figure3Options& opt, const std::filesystem::path& out);

struct Figure4Options {
  DatasetSpec data;
  std::string activation = "relu";
  double width_multiple = 1.5;
  int seeds = 10;
  std::uint64_t seed = 0;
  JointTrainConfig hyper = [] {
    JointTrainConfig c;
    c.single_precision = true;
    return c;
  }();
};

/// Conditioning during joint training. Writes figure4_joint.csv.
void figure4(const Figure4Options& opt, const std::filesystem::path& out);

}  // namespace randfeat::repro
