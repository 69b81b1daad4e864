#include "randfeat/repro.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "randfeat/activation.hpp"
#include "randfeat/csv.hpp"
#include "randfeat/errors.hpp"
#include "randfeat/features.hpp"
#include "randfeat/harmonics.hpp"
#include "randfeat/kernels.hpp"
#include "randfeat/rng.hpp"

namespace randfeat::repro {
namespace {

std::ofstream open_csv(const std::filesystem::path& path, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  csv::write_row(out, header);
  return out;
}

std::string fmt_int(long long v) { return fmt::format("{}", v); }

Eigen::Index width_for(double multiple, Eigen::Index n) {
  if (!(multiple > 0.0)) throw ConfigError(fmt::format("width multiple must be positive, got {}", multiple));
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(multiple * static_cast<double>(n))));
}

}  // namespace

Dataset load_dataset(const DatasetSpec& spec) {
  const auto& k = spec.kind;
  if (k == "file") {
    if (spec.path.empty()) throw ConfigError("dataset kind 'file' needs a path");
    IngestOptions opts;
    opts.label_col = spec.label_col;
    opts.standardize = spec.standardize;
    opts.pca_dims = spec.pca_dims;
    return ingest_csv(spec.path, opts);
  }
  if (k == "uniform") {
    if (spec.n < 1 || spec.d < 2) throw ConfigError("uniform dataset needs n >= 1 and d >= 2");
    return uniform_sphere(spec.n, spec.d, spec.seed);
  }
  if (k == "bad-set") return bad_point_set(spec.d == 0 ? 3 : spec.d);
  if (k == "synthetic1") return synthetic1(spec.seed, spec.n == 0 ? 500 : spec.n, spec.d == 0 ? 10 : spec.d);
  if (k == "synthetic2") return synthetic2(spec.seed);
  if (k == "prostate") return prostate_standin(spec.seed);
  if (k == "fashion") return fashion_standin(spec.seed);
  throw ConfigError(fmt::format("unknown dataset kind '{}'", k));
}

std::vector<std::string> dataset_notes(const DatasetSpec& spec) {
  if (spec.kind == "prostate") {
    return {"synthetic stand-in with the shape of the Prostate data (n=97, 8 standardized features on S^7)"};
  }
  if (spec.kind == "fashion") {
    return {"synthetic stand-in with the shape of the Fashion-MNIST subset (n=500, 784 pixels, PCA to 10, on S^9)"};
  }
  if (spec.kind == "synthetic1") {
    return {"Synthetic-1 recipe: uniform points on the sphere, labels x^T e"};
  }
  if (spec.kind == "synthetic2") {
    return {"Synthetic-2 recipe: 8-point bad set plus 92 uniform points on S^2, 50 labels +1"};
  }
  return {};
}

void figure1(const Figure1Options& opt, const std::filesystem::path& out) {
  const auto data = load_dataset(opt.data);
  const auto n = data.size();
  const int d = static_cast<int>(data.dimension());
  SweepOptions sweep;
  for (double mult : opt.width_multiples) sweep.widths.push_back(width_for(mult, n));
  sweep.trials = opt.trials;
  sweep.base_seed = opt.seed;

  auto rows = open_csv(out / "figure1_sweep.csv",
                       {"activation", "width", "trial", "kappa", "lambda_min", "lambda_max", "singular", "seed"});
  auto summary = open_csv(out / "figure1_summary.csv",
                          {"activation", "width", "median_kappa", "q10", "q90", "singular_fraction"});
  for (const auto& spec : opt.activations) {
    const auto act = Activation::parse(spec, d);
    const auto table = width_sweep(data.points, act, sweep);
    for (const auto& r : table.rows) {
      csv::write_row(rows, {spec, fmt_int(r.width), fmt_int(r.trial), csv::format(r.kappa), csv::format(r.lambda_min),
                            csv::format(r.lambda_max), r.singular ? "1" : "0", fmt_int(static_cast<long long>(r.seed))});
    }
    for (const auto& s : table.summary) {
      csv::write_row(summary, {spec, fmt_int(s.width), csv::format(s.median_kappa), csv::format(s.q10),
                               csv::format(s.q90), csv::format(s.singular_fraction)});
    }
  }
}

void figure2(const Figure2Options& opt, const std::filesystem::path& out) {
  const auto data = load_dataset(opt.data);
  const int d = static_cast<int>(data.dimension());
  const auto m = width_for(opt.width_multiple, data.size());
  const auto w = sample_weights(d, m, WeightDistribution::UniformSphere, opt.seed);

  auto trace_csv = open_csv(out / "figure2_train.csv", {"activation", "k", "residual", "least_norm_gap"});
  auto summary = open_csv(out / "figure2_summary.csv",
                          {"activation", "iters", "final_residual", "kappa", "eta", "status"});
  for (const auto& spec : opt.activations) {
    const auto act = Activation::parse(spec, d);
    TrainConfig cfg;
    cfg.step_rule = StepRule::LemmaOptimal;
    cfg.max_iters = opt.max_iters;
    cfg.residual_tol = opt.tol;
    cfg.record_iterates = false;
    try {
      const auto trace = train_last_layer(data.points, act, w, data.labels, cfg);
      for (std::size_t i = 0; i < trace.recorded_k.size(); ++i) {
        const auto k = trace.recorded_k[i];
        csv::write_row(trace_csv, {spec, fmt_int(k), csv::format(trace.residuals[static_cast<std::size_t>(k)]),
                                   csv::format(trace.least_norm_gap[i])});
      }
      csv::write_row(summary, {spec, fmt_int(trace.iterations), csv::format(trace.residuals.back()),
                               csv::format(trace.kappa), csv::format(trace.eta),
                               trace.converged ? "converged" : "max_iters"});
    } catch (const RankDeficientError& e) {
      csv::write_row(summary, {spec, "0", "nan", "inf", "nan", "rank_deficient"});
    }
  }
}

void figure3(const Figure3Options& opt, const std::filesystem::path& out) {
  const auto data = load_dataset(opt.data);
  const int d = static_cast<int>(data.dimension());
  const auto m = width_for(opt.width_multiple, data.size());
  const auto w = sample_weights(d, m, WeightDistribution::UniformSphere, opt.seed);

  auto filters = open_csv(out / "figure3_filters.csv", {"activation", "k", "sigma_j", "filter_value"});
  auto spectrum = open_csv(out / "figure3_spectrum.csv", {"activation", "j", "lambda_hat", "lambda_pop"});
  for (const auto& spec : opt.activations) {
    const auto act = Activation::parse(spec, d);
    const auto est = feature_matrix(data.points, w, act);
    const auto svd = spectral_report_svd(est.z);
    const double eta = 1.0 / svd.lambda_max;
    for (auto k : opt.ks) {
      for (Eigen::Index j = 0; j < svd.sigma->size(); ++j) {
        const double s = (*svd.sigma)(j);
        csv::write_row(filters, {spec, fmt_int(k), csv::format(s), csv::format(landweber_filter(s, eta, k))});
      }
    }
    const auto pop = PopulationKernel::from_expansion(funk_hecke(expand(act, d, opt.truncation)));
    const auto h = population_kernel_matrix(data.points, pop);
    const auto pop_rep = spectral_report(h);
    const auto hat_rep = spectral_report(est.h_hat);
    for (Eigen::Index j = 0; j < hat_rep.eigenvalues.size(); ++j) {
      csv::write_row(spectrum, {spec, fmt_int(j), csv::format(hat_rep.eigenvalues(j)),
                                csv::format(pop_rep.eigenvalues(j))});
    }
  }
}

void figure4(const Figure4Options& opt, const std::filesystem::path& out) {
  if (opt.seeds < 1) throw ConfigError("figure4 needs at least one seed");
  const auto data = load_dataset(opt.data);
  const auto act = Activation::parse(opt.activation, static_cast<int>(data.dimension()));
  const auto m = width_for(opt.width_multiple, data.size());
  std::vector<JointTrainTrace> traces(static_cast<std::size_t>(opt.seeds));
  kernels::parallel::for_each_task(traces.size(), [&](std::size_t s) {
    traces[s] = joint_train(data.points, data.labels, act, m, opt.hyper, derive_seed(opt.seed, s));
  });
  auto joint = open_csv(out / "figure4_joint.csv", {"seed", "epoch", "kappa", "loss"});
  for (std::size_t s = 0; s < traces.size(); ++s) {
    for (std::size_t e = 0; e < traces[s].kappa.size(); ++e) {
      csv::write_row(joint, {fmt_int(static_cast<long long>(s)), fmt_int(static_cast<long long>(e)),
                             csv::format(traces[s].kappa[e]), csv::format(traces[s].loss[e])});
    }
  }
}

}  // namespace randfeat::repro
