#ifndef BFPR_ESTIMATORS_HPP
#define BFPR_ESTIMATORS_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "bfpr/dataset.hpp"

namespace bfpr {

// Tie convention, frozen globally: y = 0.5 is predicted class 1.
inline int bayes_decide(double y) {
  if (!(y >= 0.0 && y <= 1.0))
    throw std::domain_error("bayes_decide: label outside [0,1]");
  return y >= 0.5 ? 1 : 0;
}

// epsilon = nullopt means "auto", i.e. e^{-n}. The auto value is floored at
// the smallest positive normal double so the denominator never reaches zero
// (e^{-n} underflows for n > ~708).
inline double resolve_epsilon(std::optional<double> epsilon, std::size_t n) {
  if (epsilon) {
    if (!(*epsilon > 0.0)) throw std::domain_error("epsilon must be > 0");
    return *epsilon;
  }
  const double e = std::exp(-static_cast<double>(n));
  return std::max(e, std::numeric_limits<double>::min());
}

// psi_FP,1: known-prior estimator (1/(n p0)) sum 1{y>=0.5}(1-y).
inline EstimateResult fpr_known_prior(const SoftDataset& data, const ClassPrior& prior) {
  double acc = 0.0;
  for (const auto& s : data.samples)
    if (s.y >= 0.5) acc += 1.0 - s.y;
  EstimateResult r;
  r.value = acc / (static_cast<double>(data.size()) * prior.p0);
  r.n_used = data.size();
  r.metadata["estimator"] = "psi_fp_1";
  return r;
}

// p_hat_c(0): empirical frequency of labels below 0.5.
inline double prior_hat(const SoftDataset& data) {
  std::size_t count = 0;
  for (const auto& s : data.samples)
    if (s.y < 0.5) ++count;
  return static_cast<double>(count) / static_cast<double>(data.size());
}

// psi_FP,2: prior-free ratio estimator with an epsilon-guarded denominator.
inline EstimateResult fpr_prior_free(const SoftDataset& data,
                                     std::optional<double> epsilon = std::nullopt) {
  const double eps = resolve_epsilon(epsilon, data.size());
  double num = 0.0;
  double below = 0.0;
  for (const auto& s : data.samples) {
    if (s.y >= 0.5)
      num += 1.0 - s.y;
    else
      below += 1.0;
  }
  EstimateResult r;
  r.denominator_clamped = eps > below;
  r.value = num / std::max(eps, below);
  r.n_used = data.size();
  r.metadata["estimator"] = "psi_fp_2";
  r.metadata["epsilon"] = std::to_string(eps);
  return r;
}

// Class flip: y -> 1-y. FNR estimators are the FPR estimators on the flipped
// dataset; a label at exactly 0.5 again lands in the ">=" branch.
inline SoftDataset flip_labels(const SoftDataset& data) {
  std::vector<SoftDataset::Sample> flipped;
  flipped.reserve(data.size());
  for (const auto& s : data.samples) flipped.push_back({s.x, 1.0 - s.y});
  return SoftDataset(std::move(flipped));
}

inline EstimateResult fnr_known_prior(const SoftDataset& data, const ClassPrior& prior) {
  EstimateResult r = fpr_known_prior(flip_labels(data), ClassPrior(prior.p1()));
  r.metadata["estimator"] = "psi_fn_1";
  return r;
}

inline EstimateResult fnr_prior_free(const SoftDataset& data,
                                     std::optional<double> epsilon = std::nullopt) {
  EstimateResult r = fpr_prior_free(flip_labels(data), epsilon);
  r.metadata["estimator"] = "psi_fn_2";
  return r;
}

}  // namespace bfpr

#endif  // BFPR_ESTIMATORS_HPP
