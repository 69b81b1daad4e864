#include "randfeat/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "randfeat/activation.hpp"
#include "randfeat/csv.hpp"
#include "randfeat/data.hpp"
#include "randfeat/errors.hpp"
#include "randfeat/features.hpp"
#include "randfeat/harmonics.hpp"
#include "randfeat/kernels.hpp"
#include "randfeat/repro.hpp"
#include "randfeat/rng.hpp"
#include "randfeat/training.hpp"

namespace randfeat::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::vector<std::string> kDatasetKinds{"uniform", "bad-set", "synthetic1", "synthetic2",
                                             "prostate", "fashion", "file"};

struct DatasetArgs {
  repro::DatasetSpec spec;
  int pca_dims = 0;

  repro::DatasetSpec resolve() const {
    auto s = spec;
    if (!s.path.empty()) s.kind = "file";
    if (pca_dims > 0) s.pca_dims = pca_dims;
    return s;
  }
};

void add_dataset_options(CLI::App* sub, DatasetArgs& a, const std::string& default_kind) {
  a.spec.kind = default_kind;
  sub->add_option("--dataset", a.spec.kind, "Generator: uniform, bad-set, synthetic1, synthetic2, prostate, fashion")
      ->check(CLI::IsMember(kDatasetKinds));
  sub->add_option("--data", a.spec.path, "Dataset CSV (columns x_0..x_{d-1} and a label column)");
  sub->add_option("--n", a.spec.n, "Number of points (generator default if 0)");
  sub->add_option("--d", a.spec.d, "Ambient dimension (generator default if 0)");
  sub->add_option("--data-seed", a.spec.seed, "Seed of the dataset generator");
  sub->add_option("--label-col", a.spec.label_col, "Label column of --data");
  sub->add_flag("--standardize", a.spec.standardize, "Standardize each feature column of --data");
  sub->add_option("--pca-dims", a.pca_dims, "Project --data onto this many principal components (0: off)");
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::ofstream open_csv(const fs::path& path, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  csv::write_row(out, header);
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
}

// Options of one parsed subcommand level, in declaration order.
json echo_options(const CLI::App* app) {
  json opts = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    const std::string name = "--" + names.front();
    if (opt->get_expected_max() == 0) {
      opts[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      opts[name] = opt->results();
    } else if (opt->get_expected_max() == 1 && !opt->get_default_str().empty()) {
      opts[name] = std::vector<std::string>{opt->get_default_str()};
    }
  }
  return opts;
}

json echo_levels(const CLI::App& root, std::vector<std::string>& command) {
  json levels = json::array();
  const CLI::App* app = &root;
  while (true) {
    const auto subs = app->get_subcommands();
    if (subs.empty()) break;
    app = subs.front();
    command.push_back(app->get_name());
    levels.push_back({{"name", app->get_name()}, {"options", echo_options(app)}});
  }
  return levels;
}

// Re-expands an echoed config into command-line tokens.
std::vector<std::string> expand_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path));
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path, e.what()));
  }
  if (!cfg.contains("levels")) throw ConfigError(fmt::format("config '{}' has no 'levels' record", path));
  std::vector<std::string> tokens;
  for (const auto& level : cfg["levels"]) {
    tokens.push_back(level.at("name").get<std::string>());
    for (const auto& [name, value] : level.at("options").items()) {
      if (value.is_boolean()) {
        if (value.get<bool>()) tokens.push_back(name);
        continue;
      }
      const auto values = value.get<std::vector<std::string>>();
      if (values.empty()) continue;
      tokens.push_back(name);
      for (const auto& v : values) tokens.push_back(v);
    }
  }
  return tokens;
}

class Failure {
 public:
  Failure(std::string stage, std::ostream& err) : stage_(std::move(stage)), err_(err) {}
  int report(const std::string& message, json context = json::object()) const {
    json rec{{"stage", stage_}, {"message", message}, {"context", std::move(context)}};
    err_ << rec.dump() << '\n';
    return 1;
  }

 private:
  std::string stage_;
  std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-feature conditioning experiments", "randfeat"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  const char* env_out = std::getenv(kOutDirEnv);
  std::string out_dir = env_out && *env_out ? env_out : "randfeat-out";
  int threads = 0;
  std::string config_path;
  app.add_option("--out", out_dir, fmt::format("Output directory (default ${} or ./randfeat-out)", kOutDirEnv));
  app.add_option("--threads", threads, "Thread cap (0: OpenMP default, 1: reference serial schedule)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", config_path, "Re-run the command recorded in an echoed config.json");

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Generate or ingest a point set");
  dataset->require_subcommand(1);
  auto* gen = dataset->add_subcommand("gen", "Generate a dataset");
  std::string gen_kind;
  int gen_n = 100, gen_d = 3;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind, "uniform, bad-set, synthetic1, synthetic2, prostate, fashion")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(kDatasetKinds.begin(), kDatasetKinds.end() - 1)));
  gen->add_option("--n", gen_n, "Points (uniform, synthetic1)");
  gen->add_option("--d", gen_d, "Dimension (uniform, bad-set, synthetic1)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  auto* ingest = dataset->add_subcommand("ingest", "Standardize / PCA / project a CSV to the sphere");
  std::string ingest_path;
  IngestOptions ingest_opts;
  int ingest_pca = 0;
  ingest->add_option("--input", ingest_path, "Input CSV with header")->required()->check(CLI::ExistingFile);
  ingest->add_option("--label-col", ingest_opts.label_col, "Label column name");
  ingest->add_flag("--standardize", ingest_opts.standardize, "Standard score per feature column");
  ingest->add_option("--pca-dims", ingest_pca, "Principal components to keep (0: off)");
  ingest->add_flag("--allow-duplicates", ingest_opts.allow_duplicates, "Accept repeated points");

  // spectra
  auto* spectra = app.add_subcommand("spectra", "Condition number of H_hat across widths and trials");
  DatasetArgs spectra_data;
  add_dataset_options(spectra, spectra_data, "synthetic1");
  std::string spectra_act = "relu", spectra_dist = "uniform_sphere";
  std::vector<long> spectra_widths;
  int spectra_trials = 20;
  std::uint64_t spectra_seed = 0;
  bool spectra_summary = false;
  spectra->add_option("--activation", spectra_act, "Activation spec");
  spectra->add_option("--widths", spectra_widths, "Widths m")->required()->check(CLI::PositiveNumber);
  spectra->add_option("--trials", spectra_trials, "Trials per width")->check(CLI::PositiveNumber);
  spectra->add_option("--dist", spectra_dist, "Weight distribution")
      ->check(CLI::IsMember({"uniform_sphere", "gaussian"}));
  spectra->add_option("--seed", spectra_seed, "Base seed");
  spectra->add_flag("--summary", spectra_summary, "Also write per-width quantile summary");

  // population
  auto* population = app.add_subcommand("population", "Population kernel matrix and its eigenvalues");
  DatasetArgs pop_data;
  add_dataset_options(population, pop_data, "bad-set");
  std::string pop_act = "relu";
  bool pop_closed = false, pop_ntk = false;
  int pop_k = kDefaultTruncation;
  population->add_option("--activation", pop_act, "Activation spec");
  population->add_flag("--closed-form", pop_closed, "Use the ReLU closed form instead of quadrature");
  population->add_flag("--ntk", pop_ntk, "Use the closed-form ReLU NTK");
  population->add_option("--truncation", pop_k, "Expansion degree K");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Width bounds for a target lambda_min");
  WidthBoundQuery query;
  bounds->add_option("--n", query.n, "Number of points")->required();
  bounds->add_option("--c", query.c, "Activation bound C")->required();
  bounds->add_option("--delta", query.delta, "Failure probability")->required();
  bounds->add_option("--lambda-min", query.lambda_min, "lambda_min(H)")->required();
  bounds->add_option("--kappa", query.kappa, "kappa(H)");
  bounds->add_option("--sigma1", query.sigma1, "Largest singular value of X");
  bounds->add_option("--abs-const", query.abs_const, "Absolute constant of the Gaussian bound");

  // certify
  auto* certify_cmd = app.add_subcommand("certify", "Parity census of the expansion of an activation");
  std::string cert_act = "relu";
  int cert_d = 3, cert_k = kDefaultTruncation, cert_threshold = 5;
  double cert_tol = 1e-8;
  certify_cmd->add_option("--activation", cert_act, "Activation spec");
  certify_cmd->add_option("--d", cert_d, "Dimension");
  certify_cmd->add_option("--truncation", cert_k, "Expansion degree K");
  certify_cmd->add_option("--tol", cert_tol, "Relative mode-norm threshold");
  certify_cmd->add_option("--threshold", cert_threshold, "Census count per parity");

  // train
  auto* train = app.add_subcommand("train", "Last-layer gradient descent");
  DatasetArgs train_data;
  add_dataset_options(train, train_data, "synthetic1");
  std::string train_act = "relu", train_rule = "optimal", train_dist = "uniform_sphere";
  double train_mult = 10.0, train_eta = 0.0, train_tol = 1e-8;
  std::int64_t train_iters = 10000;
  std::uint64_t train_seed = 0;
  train->add_option("--activation", train_act, "Activation spec");
  train->add_option("--width-mult", train_mult, "m = width-mult * n")->check(CLI::PositiveNumber);
  train->add_option("--step-rule", train_rule, "fixed, optimal, spectral-cap")
      ->check(CLI::IsMember({"fixed", "optimal", "spectral-cap"}));
  train->add_option("--eta", train_eta, "Step size (fixed / spectral-cap)");
  train->add_option("--max-iters", train_iters, "Iteration cap");
  train->add_option("--tol", train_tol, "Absolute residual tolerance");
  train->add_option("--seed", train_seed, "Weight seed");
  train->add_option("--dist", train_dist, "Weight distribution")->check(CLI::IsMember({"uniform_sphere", "gaussian"}));

  // landweber
  auto* landweber = app.add_subcommand("landweber", "Spectral filter factors and spectra");
  DatasetArgs lw_data;
  add_dataset_options(landweber, lw_data, "synthetic1");
  std::string lw_act = "relu";
  double lw_mult = 10.0, lw_eta = 0.0;
  std::vector<std::int64_t> lw_ks{1, 10, 100, 1000, 10000};
  int lw_k = kDefaultTruncation;
  std::uint64_t lw_seed = 0;
  landweber->add_option("--activation", lw_act, "Activation spec");
  landweber->add_option("--width-mult", lw_mult, "m = width-mult * n")->check(CLI::PositiveNumber);
  landweber->add_option("--eta", lw_eta, "Step size (0: 1/lambda_max)");
  landweber->add_option("--ks", lw_ks, "Iteration counts");
  landweber->add_option("--truncation", lw_k, "Expansion degree K for the population spectrum");
  landweber->add_option("--seed", lw_seed, "Weight seed");

  // joint-train
  auto* joint = app.add_subcommand("joint-train", "Train W and alpha jointly, track conditioning");
  DatasetArgs joint_data;
  add_dataset_options(joint, joint_data, "synthetic1");
  std::string joint_act = "relu";
  double joint_mult = 1.5;
  JointTrainConfig hyper;
  std::uint64_t joint_seed = 0;
  joint->add_option("--activation", joint_act, "Activation spec");
  joint->add_option("--width-mult", joint_mult, "m = width-mult * n")->check(CLI::PositiveNumber);
  joint->add_option("--epochs", hyper.epochs, "Epochs");
  joint->add_option("--lr", hyper.lr, "Learning rate");
  joint->add_option("--batch", hyper.batch, "Batch size");
  joint->add_option("--momentum", hyper.momentum, "Momentum");
  joint->add_option("--weight-decay", hyper.weight_decay, "Weight decay");
  joint->add_option("--lr-decay", hyper.lr_decay, "Per-epoch learning-rate factor");
  joint->add_flag("--float32", hyper.single_precision, "32-bit arithmetic");
  joint->add_option("--seed", joint_seed, "Seed");

  // repro
  auto* repro_cmd = app.add_subcommand("repro", "End-to-end figure pipelines");
  repro_cmd->require_subcommand(1);
  repro::Figure1Options f1;
  repro::Figure2Options f2;
  repro::Figure3Options f3;
  repro::Figure4Options f4;
  DatasetArgs f1_data, f2_data, f3_data, f4_data;
  auto* fig1 = repro_cmd->add_subcommand("figure1", "kappa(H_hat) versus width");
  add_dataset_options(fig1, f1_data, "synthetic1");
  fig1->add_option("--activations", f1.activations, "Activation specs");
  fig1->add_option("--width-multiples", f1.width_multiples, "Widths as multiples of n");
  fig1->add_option("--trials", f1.trials, "Trials per width")->check(CLI::PositiveNumber);
  fig1->add_option("--seed", f1.seed, "Base seed");
  auto* fig2 = repro_cmd->add_subcommand("figure2", "Gradient descent residual decay");
  add_dataset_options(fig2, f2_data, "prostate");
  fig2->add_option("--activations", f2.activations, "Activation specs");
  fig2->add_option("--width-mult", f2.width_multiple, "m = width-mult * n");
  fig2->add_option("--max-iters", f2.max_iters, "Iteration cap");
  fig2->add_option("--tol", f2.tol, "Absolute residual tolerance");
  fig2->add_option("--seed", f2.seed, "Weight seed");
  auto* fig3 = repro_cmd->add_subcommand("figure3", "Landweber filters and spectra");
  add_dataset_options(fig3, f3_data, "synthetic1");
  fig3->add_option("--activations", f3.activations, "Activation specs");
  fig3->add_option("--width-mult", f3.width_multiple, "m = width-mult * n");
  fig3->add_option("--ks", f3.ks, "Iteration counts");
  fig3->add_option("--truncation", f3.truncation, "Expansion degree K");
  fig3->add_option("--seed", f3.seed, "Weight seed");
  auto* fig4 = repro_cmd->add_subcommand("figure4", "Conditioning under joint training");
  add_dataset_options(fig4, f4_data, "synthetic1");
  fig4->add_option("--activation", f4.activation, "Activation spec");
  fig4->add_option("--width-mult", f4.width_multiple, "m = width-mult * n");
  fig4->add_option("--seeds", f4.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  fig4->add_option("--epochs", f4.hyper.epochs, "Epochs");
  fig4->add_option("--lr", f4.hyper.lr, "Learning rate");
  fig4->add_flag("--float32,!--float64", f4.hyper.single_precision, "32-bit arithmetic (default) or 64-bit");
  fig4->add_option("--seed", f4.seed, "Base seed");

  // --config replaces the subcommand part of the command line.
  std::vector<std::string> args = args_in;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    std::vector<std::string> tokens;
    try {
      tokens = expand_config(args[i + 1]);
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
    args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    args.insert(args.end(), tokens.begin(), tokens.end());
    break;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    while (!failing->get_subcommands().empty()) failing = failing->get_subcommands().front();
    err << failing->help();
    return 2;
  }

  kernels::set_num_threads(threads);
  std::vector<std::string> command;
  const json levels = echo_levels(app, command);
  std::string stage;
  for (const auto& c : command) stage += (stage.empty() ? "" : " ") + c;
  const Failure fail(stage, err);

  auto echo = [&](const fs::path& dir, const std::vector<std::string>& notes) {
    json cfg{{"schema_version", repro::kSchemaVersion},
             {"rng_version", std::string(kRngVersion)},
             {"command", command},
             {"threads", threads},
             {"levels", levels},
             {"notes", notes}};
    write_json(dir / "config.json", cfg);
  };

  try {
    if (gen->parsed()) {
      repro::DatasetSpec spec;
      spec.kind = gen_kind;
      spec.n = gen_n;
      spec.d = gen_d;
      spec.seed = gen_seed;
      if (gen_kind == "synthetic1") {
        if (gen->count("--n") == 0) spec.n = 0;
        if (gen->count("--d") == 0) spec.d = 0;
      }
      const auto data = repro::load_dataset(spec);
      const auto dir = prepare_out(out_dir);
      write_csv(data, (dir / "dataset.csv").string());
      echo(dir, repro::dataset_notes(spec));
      out << fmt::format("wrote {} points in d = {} to {}\n", data.size(), data.dimension(),
                         (dir / "dataset.csv").string());
    } else if (ingest->parsed()) {
      if (ingest_pca > 0) ingest_opts.pca_dims = ingest_pca;
      const auto data = ingest_csv(ingest_path, ingest_opts);
      const auto dir = prepare_out(out_dir);
      write_csv(data, (dir / "dataset.csv").string());
      echo(dir, {});
      out << fmt::format("wrote {} points in d = {} to {}\n", data.size(), data.dimension(),
                         (dir / "dataset.csv").string());
    } else if (spectra->parsed()) {
      const auto spec = spectra_data.resolve();
      const auto data = repro::load_dataset(spec);
      const auto act = Activation::parse(spectra_act, static_cast<int>(data.dimension()));
      SweepOptions opts;
      for (long w : spectra_widths) opts.widths.push_back(w);
      opts.trials = spectra_trials;
      opts.distribution = parse_weight_distribution(spectra_dist);
      opts.base_seed = spectra_seed;
      const auto table = width_sweep(data.points, act, opts);
      const auto dir = prepare_out(out_dir);
      auto rows = open_csv(dir / "spectra.csv",
                           {"width", "trial", "kappa", "lambda_min", "lambda_max", "singular", "seed"});
      for (const auto& r : table.rows) {
        csv::write_row(rows, {fmt::format("{}", r.width), fmt::format("{}", r.trial), csv::format(r.kappa),
                              csv::format(r.lambda_min), csv::format(r.lambda_max), r.singular ? "1" : "0",
                              fmt::format("{}", r.seed)});
      }
      if (spectra_summary) {
        auto sum = open_csv(dir / "spectra_summary.csv", {"width", "median_kappa", "q10", "q90", "singular_fraction"});
        for (const auto& s : table.summary) {
          csv::write_row(sum, {fmt::format("{}", s.width), csv::format(s.median_kappa), csv::format(s.q10),
                               csv::format(s.q90), csv::format(s.singular_fraction)});
        }
      }
      echo(dir, repro::dataset_notes(spec));
    } else if (population->parsed()) {
      const auto spec = pop_data.resolve();
      const auto data = repro::load_dataset(spec);
      const int d = static_cast<int>(data.dimension());
      PopulationKernel kernel;
      if (pop_ntk) {
        kernel = PopulationKernel::closed_form(ClosedFormKernel::NTK, d);
      } else if (pop_closed) {
        if (Activation::parse(pop_act, d).kind() != ActivationKind::ReLU) {
          throw ConfigError("--closed-form is only available for relu");
        }
        kernel = PopulationKernel::closed_form(ClosedFormKernel::ReLU, d);
      } else {
        const auto exp = expand(Activation::parse(pop_act, d), d, pop_k);
        if (exp.reconstruction_warning()) {
          err << fmt::format("warning: expansion reconstruction error {:.3g} exceeds {:.0e}\n",
                             exp.reconstruction_error, UltrasphericalExpansion::kWarnReconstruction);
        }
        kernel = PopulationKernel::from_expansion(funk_hecke(exp));
      }
      const auto h = population_kernel_matrix(data.points, kernel);
      const auto rep = spectral_report(h);
      const auto dir = prepare_out(out_dir);
      auto kcsv = open_csv(dir / "kernel.csv", {"i", "j", "value"});
      for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j)
          csv::write_row(kcsv, {fmt::format("{}", i), fmt::format("{}", j), csv::format(h(i, j))});
      auto ecsv = open_csv(dir / "eigenvalues.csv", {"j", "lambda"});
      for (Eigen::Index j = 0; j < rep.eigenvalues.size(); ++j)
        csv::write_row(ecsv, {fmt::format("{}", j), csv::format(rep.eigenvalues(j))});
      echo(dir, repro::dataset_notes(spec));
      out << fmt::format("lambda_min = {:.6g}, lambda_max = {:.6g}, singular = {}\n", rep.lambda_min, rep.lambda_max,
                         rep.singular);
    } else if (bounds->parsed()) {
      const auto c = width_bound_chernoff(query);
      const auto b = width_bound_bernstein(query);
      const auto g = width_bound_gaussian(query);
      json rec{{"schema_version", repro::kSchemaVersion},
               {"chernoff", c.m},
               {"bernstein", b.m},
               {"gaussian", g.m},
               {"gaussian_up_to_absolute_constant", g.up_to_constant},
               {"values", {{"chernoff", c.value}, {"bernstein", b.value}, {"gaussian", g.value}}},
               {"query",
                {{"n", query.n}, {"c", query.c}, {"delta", query.delta}, {"lambda_min", query.lambda_min},
                 {"kappa", query.kappa}, {"sigma1", query.sigma1}, {"abs_const", query.abs_const}}}};
      out << rec.dump(2) << '\n';
    } else if (certify_cmd->parsed()) {
      const auto exp = expand(Activation::parse(cert_act, cert_d), cert_d, cert_k);
      const auto cert = certify(exp, cert_tol, cert_threshold);
      if (exp.reconstruction_warning()) {
        err << fmt::format("warning: expansion reconstruction error {:.3g} exceeds {:.0e}\n", exp.reconstruction_error,
                           UltrasphericalExpansion::kWarnReconstruction);
      }
      json rec{{"schema_version", repro::kSchemaVersion},
               {"status", std::string(to_string(cert.status))},
               {"odd_count", cert.odd_count_above_tol},
               {"even_count", cert.even_count_above_tol},
               {"K", exp.truncation_k},
               {"tail_estimate", exp.tail_estimate},
               {"reconstruction_error", exp.reconstruction_error}};
      out << rec.dump(2) << '\n';
    } else if (train->parsed()) {
      const auto spec = train_data.resolve();
      const auto data = repro::load_dataset(spec);
      const int d = static_cast<int>(data.dimension());
      const auto act = Activation::parse(train_act, d);
      const auto m = std::max<Eigen::Index>(1, std::llround(train_mult * static_cast<double>(data.size())));
      const auto w = sample_weights(d, m, parse_weight_distribution(train_dist), train_seed);
      TrainConfig cfg;
      cfg.step_rule = parse_step_rule(train_rule);
      cfg.eta = train_eta;
      cfg.max_iters = train_iters;
      cfg.residual_tol = train_tol;
      cfg.record_iterates = false;
      const auto trace = train_last_layer(data.points, act, w, data.labels, cfg);
      const auto dir = prepare_out(out_dir);
      auto tcsv = open_csv(dir / "train.csv", {"k", "residual", "least_norm_gap"});
      for (std::size_t i = 0; i < trace.recorded_k.size(); ++i) {
        const auto k = trace.recorded_k[i];
        csv::write_row(tcsv, {fmt::format("{}", k), csv::format(trace.residuals[static_cast<std::size_t>(k)]),
                              csv::format(trace.least_norm_gap[i])});
      }
      json summary{{"schema_version", repro::kSchemaVersion},
                   {"iters", trace.iterations},
                   {"final_residual", trace.residuals.back()},
                   {"kappa", trace.kappa},
                   {"eta", trace.eta},
                   {"converged", trace.converged}};
      write_json(dir / "train_summary.json", summary);
      echo(dir, repro::dataset_notes(spec));
      out << summary.dump(2) << '\n';
    } else if (landweber->parsed()) {
      const auto spec = lw_data.resolve();
      const auto data = repro::load_dataset(spec);
      const int d = static_cast<int>(data.dimension());
      const auto act = Activation::parse(lw_act, d);
      const auto m = std::max<Eigen::Index>(1, std::llround(lw_mult * static_cast<double>(data.size())));
      const auto est = feature_matrix(data.points, sample_weights(d, m, WeightDistribution::UniformSphere, lw_seed), act);
      const auto svd = spectral_report_svd(est.z);
      const double eta = lw_eta > 0.0 ? lw_eta : 1.0 / svd.lambda_max;
      const auto dir = prepare_out(out_dir);
      auto fcsv = open_csv(dir / "landweber_filters.csv", {"k", "sigma_j", "filter_value"});
      for (auto k : lw_ks) {
        for (Eigen::Index j = 0; j < svd.sigma->size(); ++j) {
          const double s = (*svd.sigma)(j);
          csv::write_row(fcsv, {fmt::format("{}", k), csv::format(s), csv::format(landweber_filter(s, eta, k))});
        }
      }
      const auto pop = PopulationKernel::from_expansion(funk_hecke(expand(act, d, lw_k)));
      const auto pop_rep = spectral_report(population_kernel_matrix(data.points, pop));
      const auto hat_rep = spectral_report(est.h_hat);
      auto scsv = open_csv(dir / "landweber_spectrum.csv", {"j", "lambda_hat", "lambda_pop"});
      for (Eigen::Index j = 0; j < hat_rep.eigenvalues.size(); ++j) {
        csv::write_row(scsv, {fmt::format("{}", j), csv::format(hat_rep.eigenvalues(j)),
                              csv::format(pop_rep.eigenvalues(j))});
      }
      echo(dir, repro::dataset_notes(spec));
    } else if (joint->parsed()) {
      const auto spec = joint_data.resolve();
      const auto data = repro::load_dataset(spec);
      const auto act = Activation::parse(joint_act, static_cast<int>(data.dimension()));
      const auto m = std::max<Eigen::Index>(1, std::llround(joint_mult * static_cast<double>(data.size())));
      const auto trace = joint_train(data.points, data.labels, act, m, hyper, joint_seed);
      const auto dir = prepare_out(out_dir);
      auto jcsv = open_csv(dir / "joint_train.csv", {"epoch", "kappa", "loss"});
      for (std::size_t e = 0; e < trace.kappa.size(); ++e) {
        csv::write_row(jcsv, {fmt::format("{}", e), csv::format(trace.kappa[e]), csv::format(trace.loss[e])});
      }
      echo(dir, repro::dataset_notes(spec));
    } else if (fig1->parsed()) {
      f1.data = f1_data.resolve();
      const auto dir = prepare_out(out_dir);
      repro::figure1(f1, dir);
      echo(dir, repro::dataset_notes(f1.data));
    } else if (fig2->parsed()) {
      f2.data = f2_data.resolve();
      const auto dir = prepare_out(out_dir);
      repro::figure2(f2, dir);
      echo(dir, repro::dataset_notes(f2.data));
    } else if (fig3->parsed()) {
      f3.data = f3_data.resolve();
      const auto dir = prepare_out(out_dir);
      repro::figure3(f3, dir);
      echo(dir, repro::dataset_notes(f3.data));
    } else if (fig4->parsed()) {
      f4.data = f4_data.resolve();
      const auto dir = prepare_out(out_dir);
      repro::figure4(f4, dir);
      echo(dir, repro::dataset_notes(f4.data));
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const RankDeficientError& e) {
    return fail.report(e.what(), {{"lambda_min", e.lambda_min()}, {"tolerance", e.tolerance()}});
  } catch (const ParseError& e) {
    return fail.report(e.what(), {{"row", e.row()}, {"col", e.col()}});
  } catch (const std::exception& e) {
    return fail.report(e.what());
  }
  return 0;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace randfeat::cli
