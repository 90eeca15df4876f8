// Acceptance suite: one statistical/exactness criterion per check, each
// printed as a PASS/FAIL line. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "bfpr/estimators.hpp"
#include "bfpr/harness.hpp"
#include "bfpr/io.hpp"
#include "bfpr/models.hpp"
#include "bfpr/noisy.hpp"
#include "bfpr/random.hpp"
#include "bfpr/stats.hpp"

using namespace bfpr;

namespace {

int failures = 0;

void report(const std::string& name, bool passed, const std::string& detail) {
  std::cout << (passed ? "PASS " : "FAIL ") << name << "  " << detail << std::endl;
  if (!passed) ++failures;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// k=10 workhorse model: uniform categories, posteriors 0.05, 0.15, ..., 0.95.
FiniteModel model_k10() {
  std::vector<double> px(10, 0.1), post(10);
  for (int i = 0; i < 10; ++i) post[i] = 0.05 + 0.1 * i;
  return FiniteModel(px, post);
}

// Independent long-double enumeration of the FPR identity for finite models.
long double brute_force_fpr(const FiniteModel& m) {
  long double num = 0.0L, mass = 0.0L;
  for (std::size_t i = 0; i < m.p_x.size(); ++i) {
    const long double w = static_cast<long double>(m.p_x[i]) *
                          (1.0L - static_cast<long double>(m.posterior[i]));
    mass += w;
    if (m.posterior[i] >= 0.5) num += w;
  }
  return num / mass;
}

void criterion_1_oracle_exactness() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(1001);
  double max_err = 0.0;
  int models = 0;
  while (models < 100) {
    const std::size_t k = 1 + rng.next_u64() % 20;
    std::vector<double> px(k), post(k);
    double total = 0.0;
    for (auto& p : px) total += (p = 0.05 + rng.uniform());
    for (auto& p : px) p /= total;
    // renormalize exactly enough for the 1e-12 sum invariant
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) s += px[i];
    px[k - 1] = 1.0 - s;
    for (auto& p : post) p = rng.uniform();
    const FiniteModel m(px, post);
    const PriorPair prior = detail::compute_prior(m);
    if (prior.p0_mass <= 1e-6 || prior.p0_mass >= 1.0 - 1e-6) continue;
    ++models;
    max_err = std::max(max_err,
                       std::abs(exact_fpr(m) - static_cast<double>(brute_force_fpr(m))));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report("criterion-01 oracle exactness", max_err <= 1e-12 && secs < 1.0,
         "max_err=" + fmt(max_err) + " runtime=" + fmt(secs) + "s");
}

void criteria_2_to_5_theorem1() {
  ExperimentConfig cfg{FiniteModel({0.5, 0.5}, {0.8, 0.3})};
  EstimatorSpec psi1;
  psi1.kind = EstimatorKind::psi1;
  psi1.p0 = 0.45;
  cfg.estimators.push_back(psi1);
  cfg.n_grid = {100, 1000, 10000};
  cfg.replicates = 10000;
  cfg.seed = 20250826;
  cfg.deltas = {0.5, 0.1, 0.05};
  cfg.threads = 4;

  const auto start = std::chrono::steady_clock::now();
  const ExperimentReport rep = run_replicates(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double m_d = 10000.0;
  const double oracle = 0.1 / 0.45;

  // 2: unbiasedness at n = 100
  {
    const CellStats& c = rep.cells[0];
    const double tol = 4.0 * std::sqrt(c.variance / m_d);
    report("criterion-02 unbiasedness", std::abs(c.mean - oracle) <= tol,
           "|mean-oracle|=" + fmt(std::abs(c.mean - oracle)) + " tol=" + fmt(tol) +
               " runtime=" + fmt(secs) + "s");
  }
  // 3: Hoeffding bound at n = 100 for each delta
  {
    const CellStats& c = rep.cells[0];
    bool ok = std::abs(hoeffding_radius(100, 0.45, 0.05) - 0.1509) < 5e-4;
    std::string detail = "radius(0.05)=" + fmt(hoeffding_radius(100, 0.45, 0.05));
    for (const auto& [delta, rate] : c.hoeffding_violation) {
      const double tol = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / m_d);
      if (rate > tol) ok = false;
      detail += " rate(" + fmt(delta) + ")=" + fmt(rate) + "<=" + fmt(tol);
    }
    report("criterion-03 hoeffding bound", ok, detail);
  }
  // 4: variance bound across the n grid
  {
    bool ok = true;
    std::string detail;
    const double slack = 5.0 * std::sqrt(2.0 / (m_d - 1.0));
    for (const CellStats& c : rep.cells) {
      const double bound = c.variance_bound * (1.0 + slack);
      if (c.variance > bound) ok = false;
      detail += "n=" + std::to_string(c.n) + ":" + fmt(c.variance) + "<=" + fmt(bound) + " ";
    }
    report("criterion-04 variance bound", ok, detail);
  }
  // 5: asymptotic normality at n = 10^4
  {
    const CellStats& c = rep.cells[2];
    const double threshold = 2.0 * 1.36 / std::sqrt(m_d);
    report("criterion-05 asymptotic normality",
           c.ks_statistic <= threshold && secs < 60.0,
           "ks=" + fmt(c.ks_statistic) + " threshold=" + fmt(threshold));
  }
}

bool median_errors_decrease(const ExperimentReport& rep, std::string& detail) {
  bool ok = true;
  detail = "median_abs_error:";
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    if (i > 0 && rep.cells[i].median_abs_error > 1.1 * rep.cells[i - 1].median_abs_error)
      ok = false;
    detail += " " + fmt(rep.cells[i].median_abs_error);
  }
  return ok;
}

void criterion_6_psi2_consistency() {
  // psi2's denominator estimates Pr(y < 0.5), so consistency for the true FPR
  // needs a model where Pr(y < 0.5) equals the class-0 probability E[1-y];
  // the symmetric posteriors below give 0.5 for both readings.
  ExperimentConfig cfg{FiniteModel({0.5, 0.5}, {0.8, 0.2})};
  cfg.estimators.push_back({EstimatorKind::psi2});
  cfg.n_grid = {100, 1000, 10000, 100000};
  cfg.replicates = 1000;
  cfg.seed = 60606;
  cfg.threads = 4;
  const ExperimentReport rep = run_replicates(cfg);
  std::string detail;
  bool ok = median_errors_decrease(rep, detail);
  if (rep.cells.back().median_abs_error > 0.01) ok = false;
  report("criterion-06 psi2 consistency", ok, detail + " (final<=0.01)");
}

void criterion_7_dn_properties() {
  const FiniteModel model = model_k10();
  const NoiseModel noise = UniformAdditiveNoise(0.2);
  const std::size_t n = 500, M = 10000;
  const double a = -0.2, b = 1.2, delta = 0.05;
  const double radius_const = (0.5 + b - a) * (0.5 + b - a) * std::log(2.0 / delta) / 2.0;

  std::vector<std::vector<double>> per_feature(10);
  std::size_t events = 0, violations = 0;
  for (std::size_t r = 0; r < M; ++r) {
    const std::uint64_t seed = Rng::substream(707, r).next_u64();
    const NoisyDataset d = sample_noisy(model, noise, n, seed);
    double sum[10] = {0}, count[10] = {0};
    for (const auto& s : d.samples) {
      sum[s.x.index] += s.y_tilde;
      count[s.x.index] += 1.0;
    }
    for (int f = 0; f < 10; ++f) {
      if (count[f] == 0.0) continue;
      const double value = sum[f] / count[f];
      per_feature[f].push_back(value);
      const double radius = std::sqrt(radius_const / count[f]);
      ++events;
      if (std::abs(value - model.posterior[f]) >= radius) ++violations;
    }
  }

  bool mean_ok = true;
  double worst = 0.0;
  for (int f = 0; f < 10; ++f) {
    const double mn = mean(per_feature[f]);
    const double se =
        std::sqrt(sample_variance(per_feature[f]) / static_cast<double>(per_feature[f].size()));
    const double dev = std::abs(mn - model.posterior[f]);
    worst = std::max(worst, dev / (4.0 * se));
    if (dev > 4.0 * se) mean_ok = false;
  }
  const double rate = static_cast<double>(violations) / static_cast<double>(events);
  const double tol =
      delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(events));
  report("criterion-07 dn unbiasedness + rate bound", mean_ok && rate <= tol,
         "worst_dev/4se=" + fmt(worst) + " violation_rate=" + fmt(rate) + "<=" + fmt(tol));
}

void criterion_8_example1_reduction() {
  Rng rng(808);
  const KernelSpec kernel = KernelSpec::triangular();
  const MetricSpec metric = MetricSpec::discrete();
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rng.next_u64() % 60;
    const std::uint32_t k = 1 + rng.next_u64() % 8;
    std::vector<NoisyDataset::Sample> s;
    for (std::size_t i = 0; i < n; ++i)
      s.push_back({FeatureValue::category(static_cast<std::uint32_t>(rng.next_u64() % k)),
                   -0.1 + 1.2 * rng.uniform()});
    const NoisyDataset d(std::move(s), -0.1, 1.1);
    const PartitionSpec spec(0.1 + 0.8 * rng.uniform(), rng.next_u64());
    if (fpr_denoised(d, spec, 1e-9).value != fpr_nw(d, spec, metric, kernel, 1.0, 1e-9).value)
      ++mismatches;
  }
  report("criterion-08 Example-1 reduction (bit-for-bit)", mismatches == 0,
         "mismatches=" + std::to_string(mismatches) + "/1000");
}

void criterion_9_Psi1_consistency() {
  ExperimentConfig cfg{model_k10()};
  cfg.noise = UniformAdditiveNoise(0.2);
  EstimatorSpec est;
  est.kind = EstimatorKind::big_psi1;
  est.ratio = 0.5;
  cfg.estimators.push_back(est);
  cfg.n_grid = {100, 1000, 10000, 100000};
  cfg.replicates = 400;
  cfg.seed = 909;
  cfg.threads = 4;
  const ExperimentReport rep = run_replicates(cfg);
  std::string detail;
  bool ok = median_errors_decrease(rep, detail);
  if (rep.cells.back().median_abs_error > 0.02) ok = false;
  report("criterion-09 Psi1 consistency", ok, detail + " (final<=0.02)");
}

void criterion_10_Psi2_consistency() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg{Smooth1DModel::stock_sine()};
  cfg.noise = UniformAdditiveNoise(0.2);
  EstimatorSpec est;
  est.kind = EstimatorKind::big_psi2;
  est.ratio = 0.5;
  cfg.estimators.push_back(est);
  cfg.n_grid = {100, 1000, 10000};
  cfg.replicates = 100;
  cfg.seed = 1010;
  cfg.threads = 4;
  const ExperimentReport rep = run_replicates(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string detail;
  const bool ok = median_errors_decrease(rep, detail) && secs < 300.0;
  report("criterion-10 Psi2 consistency", ok, detail + " runtime=" + fmt(secs) + "s");
}

void criterion_11_binary_pipeline() {
  ExperimentConfig cfg{model_k10()};
  cfg.noise = BernoulliBinaryNoise{};
  EstimatorSpec est;
  est.kind = EstimatorKind::big_psi1;
  est.ratio = 0.5;
  cfg.estimators.push_back(est);
  cfg.n_grid = {100000};
  cfg.replicates = 100;
  cfg.seed = 1111;
  cfg.threads = 4;
  const ExperimentReport rep = run_replicates(cfg);
  const bool ok = rep.cells[0].median_abs_error <= 0.02 && rep.continuity_assumption_violated;
  report("criterion-11 binary-label pipeline", ok,
         "median_abs_error=" + fmt(rep.cells[0].median_abs_error) +
             " continuity_flag=" + (rep.continuity_assumption_violated ? "raised" : "absent"));
}

void criterion_12_fnr_duality() {
  Rng rng(1212);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng.next_u64() % 50;
    std::vector<SoftDataset::Sample> s;
    for (std::size_t i = 0; i < n; ++i)
      s.push_back({FeatureValue::category(static_cast<std::uint32_t>(rng.next_u64() % 6)),
                   rng.uniform()});
    const SoftDataset d(std::move(s));
    const SoftDataset flipped = flip_labels(d);
    const double p0 = 0.05 + 0.9 * rng.uniform();
    if (fnr_known_prior(d, ClassPrior(p0)).value !=
        fpr_known_prior(flipped, ClassPrior(1.0 - p0)).value)
      ++mismatches;
    if (fnr_prior_free(d, 1e-9).value != fpr_prior_free(flipped, 1e-9).value) ++mismatches;
  }
  report("criterion-12 FNR duality (exact)", mismatches == 0,
         "mismatches=" + std::to_string(mismatches) + "/2000");
}

void criterion_13_reproducibility() {
  const json cj = {
      {"model", {{"type", "finite"}, {"p_x", {0.5, 0.5}}, {"posterior", {0.8, 0.3}}}},
      {"noise", {{"type", "uniform"}, {"sigma", 0.2}}},
      {"estimators", {{{"name", "Psi1"}, {"ratio", 0.5}}}},
      {"n_grid", {100, 500}},
      {"replicates", 300},
      {"seed", 1313},
      {"deltas", {0.1}},
      {"checks", {"consistency"}}};
  ExperimentConfig cfg = parse_config(cj);
  cfg.threads = 1;
  const std::string run1 = report_to_json(run_replicates(cfg), config_to_json(cfg)).dump(2);
  cfg.threads = 5;
  const std::string run2 = report_to_json(run_replicates(cfg), config_to_json(cfg)).dump(2);
  const std::string run3 = report_to_json(run_replicates(cfg), config_to_json(cfg)).dump(2);
  report("criterion-13 reproducibility", run1 == run2 && run2 == run3,
         "byte-identical reports across reruns and worker counts 1/5");
}

}  // namespace

int main() {
  criterion_1_oracle_exactness();
  criteria_2_to_5_theorem1();
  criterion_6_psi2_consistency();
  criterion_7_dn_properties();
  criterion_8_example1_reduction();
  criterion_9_Psi1_consistency();
  criterion_10_Psi2_consistency();
  criterion_11_binary_pipeline();
  criterion_12_fnr_duality();
  criterion_13_reproducibility();
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(failures))
            << std::endl;
  return failures == 0 ? 0 : 1;
}
