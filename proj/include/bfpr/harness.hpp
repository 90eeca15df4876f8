#ifndef BFPR_HARNESS_HPP
#define BFPR_HARNESS_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bfpr/estimators.hpp"
#include "bfpr/models.hpp"
#include "bfpr/noisy.hpp"
#include "bfpr/stats.hpp"

namespace bfpr {

enum class EstimatorKind { psi1, psi2, big_psi1, big_psi2 };

inline std::string estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::psi1: return "psi1";
    case EstimatorKind::psi2: return "psi2";
    case EstimatorKind::big_psi1: return "Psi1";
    case EstimatorKind::big_psi2: return "Psi2";
  }
  throw std::logic_error("unreachable");
}

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::psi1;
  std::optional<double> p0;         // psi1; defaults to the oracle class mass
  std::optional<double> epsilon;    // nullopt = auto (e^{-n})
  double ratio = 0.5;               // Psi1/Psi2 partition ratio
  std::optional<double> bandwidth;  // Psi2; nullopt = default schedule
};

struct ExperimentConfig {
  GenerativeModel model;
  std::optional<NoiseModel> noise;
  std::vector<EstimatorSpec> estimators;
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<double> deltas;
  unsigned threads = 1;
  std::vector<std::string> checks;  // unbiasedness, hoeffding, variance, normality, consistency
};

struct CellStats {
  std::string estimator;
  std::size_t n = 0;
  double mean = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double variance_bound = 0.0;  // 1/(16 n p0^2)
  std::map<double, double> hoeffding_violation;
  double ks_statistic = 0.0;
  double median_abs_error = 0.0;
  double runtime_sec = 0.0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  double oracle_fpr = 0.0;
  double oracle_fnr = 0.0;
  double p0_mass = 0.0;
  double p0_threshold = 0.0;
  bool continuity_assumption_violated = false;  // binary labels (Remark 1 regime)
  bool holder_certified = false;
  std::vector<CellStats> cells;
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

// Theorem 1.2 deviation radius.
inline double hoeffding_radius(std::size_t n, double p0, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (8.0 * static_cast<double>(n) * p0 * p0));
}

inline double bound_violation_rate(std::span<const double> estimates, double oracle,
                                   std::size_t n, double p0, double delta) {
  if (estimates.empty()) throw std::invalid_argument("bound_violation_rate: empty sample");
  const double radius = hoeffding_radius(n, p0, delta);
  std::size_t violations = 0;
  for (double e : estimates)
    if (std::abs(e - oracle) >= radius) ++violations;
  return static_cast<double>(violations) / static_cast<double>(estimates.size());
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.replicates < 100)
    throw std::invalid_argument("config: replicates must be >= 100");
  if (cfg.n_grid.empty()) throw std::invalid_argument("config: empty n grid");
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
    if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
      throw std::invalid_argument("config: n grid must be strictly increasing");
  if (cfg.estimators.empty()) throw std::invalid_argument("config: no estimators selected");
  for (double d : cfg.deltas)
    if (!(d > 0.0 && d < 1.0))
      throw std::invalid_argument("config: delta values must lie in (0,1)");
  const bool finite = std::holds_alternative<FiniteModel>(cfg.model);
  for (const auto& est : cfg.estimators) {
    switch (est.kind) {
      case EstimatorKind::psi1:
      case EstimatorKind::psi2:
        if (cfg.noise)
          throw std::invalid_argument(
              "config: psi1/psi2 require soft labels; remove the noise spec");
        break;
      case EstimatorKind::big_psi1:
        if (!finite)
          throw std::invalid_argument(
              "config: Psi1 (dn-based) requires categorical features; use Psi2");
        break;
      case EstimatorKind::big_psi2:
        break;
    }
    if (!(est.ratio > 0.0 && est.ratio < 1.0))
      throw std::invalid_argument("config: partition ratio must lie in (0,1)");
  }
}

namespace detail {

inline double run_one(const ExperimentConfig& cfg, const EstimatorSpec& est,
                      double oracle_p0, std::size_t n, std::uint64_t rep_seed) {
  switch (est.kind) {
    case EstimatorKind::psi1: {
      const SoftDataset d = sample_soft(cfg.model, n, rep_seed);
      return fpr_known_prior(d, ClassPrior(est.p0 ? *est.p0 : oracle_p0)).value;
    }
    case EstimatorKind::psi2: {
      const SoftDataset d = sample_soft(cfg.model, n, rep_seed);
      return fpr_prior_free(d, est.epsilon).value;
    }
    case EstimatorKind::big_psi1:
    case EstimatorKind::big_psi2: {
      NoisyDataset d = [&] {
        if (cfg.noise) return sample_noisy(cfg.model, *cfg.noise, n, rep_seed);
        // Noiseless regime: soft labels wrapped as already-denoised noisy ones.
        const SoftDataset soft = sample_soft(cfg.model, n, rep_seed);
        std::vector<NoisyDataset::Sample> s;
        s.reserve(soft.size());
        for (const auto& smp : soft.samples) s.push_back({smp.x, smp.y});
        return NoisyDataset(std::move(s), 0.0, 1.0);
      }();
      const PartitionSpec spec(est.ratio, rep_seed ^ 0xa02f3c1d5e6b7981ULL);
      if (est.kind == EstimatorKind::big_psi1)
        return fpr_denoised(d, spec, est.epsilon).value;
      const bool finite = std::holds_alternative<FiniteModel>(cfg.model);
      // Finite features get the discrete metric with h = 1 (the Example-1
      // reduction); continuous features get Euclidean + bandwidth schedule.
      const MetricSpec metric = finite ? MetricSpec::discrete() : MetricSpec::euclidean();
      const std::optional<double> h =
          est.bandwidth ? est.bandwidth : (finite ? std::optional<double>(1.0) : std::nullopt);
      return fpr_nw(d, spec, metric, KernelSpec::triangular(), h, est.epsilon).value;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

inline ExperimentReport run_replicates(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const PriorPair prior = exact_prior(cfg.model);
  ExperimentReport report;
  report.oracle_fpr = exact_fpr(cfg.model);
  report.oracle_fnr = exact_fnr(cfg.model);
  report.p0_mass = prior.p0_mass;
  report.p0_threshold = prior.p0_threshold;
  report.continuity_assumption_violated =
      cfg.noise && std::holds_alternative<BernoulliBinaryNoise>(*cfg.noise);
  report.holder_certified = std::holds_alternative<Smooth1DModel>(cfg.model);

  const std::size_t reps = cfg.replicates;
  const unsigned workers = std::max(1u, cfg.threads);

  for (std::size_t est_idx = 0; est_idx < cfg.estimators.size(); ++est_idx) {
    const EstimatorSpec& est = cfg.estimators[est_idx];
    std::vector<double> median_errors;
    for (std::size_t n_idx = 0; n_idx < cfg.n_grid.size(); ++n_idx) {
      const std::size_t n = cfg.n_grid[n_idx];
      const auto start = std::chrono::steady_clock::now();

      // Replicate r gets the substream seed ^ f(n_idx*M + r); written by
      // index, so the result is identical for any worker count.
      std::vector<double> estimates(reps);
      const std::uint64_t base = static_cast<std::uint64_t>(n_idx) * reps;
      auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
          const std::uint64_t rep_seed =
              Rng::substream(cfg.seed, base + r).next_u64();
          estimates[r] = detail::run_one(cfg, est, prior.p0_mass, n, rep_seed);
        }
      };
      if (workers == 1) {
        worker(0, reps);
      } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (reps + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
          const std::size_t lo = std::min<std::size_t>(w * chunk, reps);
          const std::size_t hi = std::min<std::size_t>(lo + chunk, reps);
          if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& t : pool) t.join();
      }

      CellStats cell;
      cell.estimator = estimator_name(est.kind);
      cell.n = n;
      cell.mean = mean(estimates);
      cell.bias = cell.mean - report.oracle_fpr;
      cell.variance = sample_variance(estimates);
      cell.variance_bound =
          1.0 / (16.0 * static_cast<double>(n) * prior.p0_mass * prior.p0_mass);
      for (double d : cfg.deltas)
        cell.hoeffding_violation[d] =
            bound_violation_rate(estimates, report.oracle_fpr, n, prior.p0_mass, d);
      cell.ks_statistic = cell.variance > 0.0 ? ks_normal(estimates) : 1.0;
      std::vector<double> abs_err(reps);
      for (std::size_t r = 0; r < reps; ++r)
        abs_err[r] = std::abs(estimates[r] - report.oracle_fpr);
      cell.median_abs_error = median(abs_err);
      cell.runtime_sec =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      median_errors.push_back(cell.median_abs_error);
      report.cells.push_back(cell);
    }

    // Property checks for this estimator.
    const double m_d = static_cast<double>(reps);
    for (const std::string& check : cfg.checks) {
      for (std::size_t n_idx = 0; n_idx < cfg.n_grid.size(); ++n_idx) {
        const CellStats& cell =
            report.cells[est_idx * cfg.n_grid.size() + n_idx];
        const std::string tag =
            check + "[" + cell.estimator + ",n=" + std::to_string(cell.n) + "]";
        if (check == "unbiasedness") {
          const double se = std::sqrt(cell.variance / m_d);
          const double tol = 4.0 * se;
          report.checks.push_back({tag, std::abs(cell.bias) <= tol,
                                   "|bias|=" + std::to_string(std::abs(cell.bias)) +
                                       " tol=" + std::to_string(tol)});
        } else if (check == "hoeffding") {
          for (const auto& [delta, rate] : cell.hoeffding_violation) {
            const double tol = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / m_d);
            report.checks.push_back(
                {tag + " delta=" + std::to_string(delta), rate <= tol,
                 "rate=" + std::to_string(rate) + " tol=" + std::to_string(tol)});
          }
        } else if (check == "variance") {
          const double slack = 5.0 * std::sqrt(2.0 / (m_d - 1.0));
          const double bound = cell.variance_bound * (1.0 + slack);
          report.checks.push_back({tag, cell.variance <= bound,
                                   "var=" + std::to_string(cell.variance) +
                                       " bound=" + std::to_string(bound)});
        } else if (check == "normality") {
          const double threshold = 2.0 * 1.36 / std::sqrt(m_d);
          report.checks.push_back({tag, cell.ks_statistic <= threshold,
                                   "ks=" + std::to_string(cell.ks_statistic) +
                                       " threshold=" + std::to_string(threshold)});
        }
      }
      if (check == "consistency") {
        bool ok = true;
        for (std::size_t i = 1; i < median_errors.size(); ++i)
          if (median_errors[i] > 1.1 * median_errors[i - 1]) ok = false;
        std::string detail = "median_abs_error:";
        for (double e : median_errors) detail += " " + std::to_string(e);
        report.checks.push_back(
            {"consistency[" + estimator_name(est.kind) + "]", ok, detail});
      }
    }
  }
  return report;
}

}  // namespace bfpr

#endif  // BFPR_HARNESS_HPP
