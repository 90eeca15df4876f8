// Command-line front end: synth, estimate, oracle, experiment.
// Exit codes: 0 success, 1 statistical check failed, 2 usage/validation error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bfpr/estimators.hpp"
#include "bfpr/harness.hpp"
#include "bfpr/io.hpp"
#include "bfpr/models.hpp"
#include "bfpr/noisy.hpp"

namespace {

using bfpr::json;

int cmd_synth(const std::string& model_path, const std::string& noise_path,
              std::size_t n, std::uint64_t seed, const std::string& out_path) {
  const bfpr::GenerativeModel model = bfpr::parse_model(bfpr::read_json_file(model_path));
  std::ofstream out(out_path);
  if (!out) throw bfpr::IoError("cannot write file: " + out_path);
  std::optional<std::size_t> categories;
  if (const auto* fm = std::get_if<bfpr::FiniteModel>(&model)) categories = fm->p_x.size();
  if (noise_path.empty()) {
    bfpr::save_dataset(bfpr::sample_soft(model, n, seed), out, categories);
  } else {
    const bfpr::NoiseModel noise = bfpr::parse_noise(bfpr::read_json_file(noise_path));
    bfpr::save_dataset(bfpr::sample_noisy(model, noise, n, seed), out, categories);
  }
  return 0;
}

json result_to_json(const bfpr::EstimateResult& r) {
  json meta = json::object();
  for (const auto& [k, v] : r.metadata) meta[k] = v;
  return {{"value", r.value},
          {"denominator_clamped", r.denominator_clamped},
          {"n_used", r.n_used},
          {"metadata", meta}};
}

int cmd_estimate(const std::string& dataset_path, const std::string& estimator,
                 bool fnr, std::optional<double> p0, std::optional<double> epsilon,
                 double ratio, std::optional<double> bandwidth, std::uint64_t seed) {
  std::ifstream in(dataset_path);
  if (!in) throw bfpr::IoError("cannot open file: " + dataset_path);
  const bfpr::DatasetFile file = bfpr::load_dataset(in);
  const bfpr::EstimatorKind kind = bfpr::parse_estimator_kind(estimator);

  bfpr::EstimateResult result;
  if (kind == bfpr::EstimatorKind::psi1 || kind == bfpr::EstimatorKind::psi2) {
    if (file.schema != "soft")
      throw bfpr::IoError("estimator " + estimator + " requires a soft-label dataset, got '" +
                          file.schema + "'");
    const bfpr::SoftDataset& d = *file.soft;
    if (kind == bfpr::EstimatorKind::psi1) {
      if (!p0) throw bfpr::IoError("estimator psi1 requires --p0");
      const bfpr::ClassPrior prior(*p0);
      result = fnr ? bfpr::fnr_known_prior(d, prior) : bfpr::fpr_known_prior(d, prior);
    } else {
      result = fnr ? bfpr::fnr_prior_free(d, epsilon) : bfpr::fpr_prior_free(d, epsilon);
    }
  } else {
    if (file.schema == "soft")
      throw bfpr::IoError("estimator " + estimator +
                          " requires a noisy or binary dataset, got 'soft'");
    const bfpr::NoisyDataset& d = *file.noisy;
    const bfpr::PartitionSpec spec(ratio, seed);
    if (kind == bfpr::EstimatorKind::big_psi1) {
      result = fnr ? bfpr::fnr_denoised(d, spec, epsilon)
                   : bfpr::fpr_denoised(d, spec, epsilon);
    } else {
      const bool categorical =
          d.samples.front().x.kind == bfpr::FeatureValue::Kind::categorical;
      const bfpr::MetricSpec metric =
          categorical ? bfpr::MetricSpec::discrete() : bfpr::MetricSpec::euclidean();
      const std::optional<double> h =
          bandwidth ? bandwidth
                    : (categorical ? std::optional<double>(1.0) : std::nullopt);
      result = fnr ? bfpr::fnr_nw(d, spec, metric, bfpr::KernelSpec::triangular(), h, epsilon)
                   : bfpr::fpr_nw(d, spec, metric, bfpr::KernelSpec::triangular(), h, epsilon);
    }
  }
  std::cout << result_to_json(result).dump(2) << "\n";
  return 0;
}

int cmd_oracle(const std::string& model_path) {
  const bfpr::GenerativeModel model = bfpr::parse_model(bfpr::read_json_file(model_path));
  const bfpr::PriorPair prior = bfpr::exact_prior(model);
  const bool finite = std::holds_alternative<bfpr::FiniteModel>(model);
  const json out = {{"fpr", bfpr::exact_fpr(model)},
                    {"fnr", bfpr::exact_fnr(model)},
                    {"p0_mass", prior.p0_mass},
                    {"p0_threshold", prior.p0_threshold},
                    {"method", finite ? "finite_sum" : "adaptive_quadrature"},
                    {"tolerance", finite ? 0.0 : bfpr::kQuadratureTol}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path,
                   std::optional<std::uint64_t> seed_override,
                   std::optional<unsigned> threads_override) {
  bfpr::ExperimentConfig cfg = bfpr::parse_config(bfpr::read_json_file(config_path));
  if (seed_override) cfg.seed = *seed_override;
  if (threads_override) cfg.threads = *threads_override;
  const bfpr::ExperimentReport report = bfpr::run_replicates(cfg);
  {
    std::ofstream out(out_path);
    if (!out) throw bfpr::IoError("cannot write file: " + out_path);
    out << bfpr::report_to_json(report, bfpr::config_to_json(cfg)).dump(2) << "\n";
  }
  for (const auto& check : report.checks)
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << "  " << check.detail
              << "\n";
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes-classifier FPR/FNR estimation from soft and noisy labels"};
  app.require_subcommand(1);

  std::string model_path, noise_path, dataset_path, out_path, config_path, estimator;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool fnr = false;
  double ratio = 0.5;
  std::optional<double> p0, epsilon, bandwidth;
  std::optional<std::uint64_t> seed_override;
  std::optional<unsigned> threads_override;

  auto* synth = app.add_subcommand("synth", "Sample a synthetic dataset from a model spec");
  synth->add_option("--model", model_path, "model spec JSON file")->required();
  synth->add_option("--noise", noise_path, "noise spec JSON file (omit for soft labels)");
  synth->add_option("--n", n, "sample count")->required();
  synth->add_option("--seed", seed, "RNG seed")->required();
  synth->add_option("--out", out_path, "output dataset file (JSON Lines)")->required();

  auto* estimate = app.add_subcommand("estimate", "Run an estimator on a dataset file");
  estimate->add_option("--dataset", dataset_path, "dataset file")->required();
  estimate->add_option("--estimator", estimator, "psi1|psi2|Psi1|Psi2")->required();
  estimate->add_flag("--fnr", fnr, "estimate the FNR instead of the FPR");
  estimate->add_option("--p0", p0, "class-0 prior (required for psi1)");
  estimate->add_option("--epsilon", epsilon, "denominator floor (default: e^-n)");
  estimate->add_option("--ratio", ratio, "partition ratio for Psi1/Psi2");
  estimate->add_option("--bandwidth", bandwidth, "NW bandwidth (default: schedule)");
  estimate->add_option("--seed", seed, "partition seed");

  auto* oracle = app.add_subcommand("oracle", "Exact FPR/FNR and priors of a model");
  oracle->add_option("--model", model_path, "model spec JSON file")->required();

  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment config");
  experiment->add_option("--config", config_path, "experiment config JSON file")->required();
  experiment->add_option("--out", out_path, "output report JSON file")->required();
  experiment->add_option("--seed", seed_override, "override the config seed");
  experiment->add_option("--threads", threads_override, "override the worker count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(model_path, noise_path, n, seed, out_path);
    if (estimate->parsed())
      return cmd_estimate(dataset_path, estimator, fnr, p0, epsilon, ratio, bandwidth, seed);
    if (oracle->parsed()) return cmd_oracle(model_path);
    if (experiment->parsed())
      return cmd_experiment(config_path, out_path, seed_override, threads_override);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
