#ifndef BFPR_NOISY_HPP
#define BFPR_NOISY_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bfpr/dataset.hpp"
#include "bfpr/denoise.hpp"
#include "bfpr/estimators.hpp"
#include "bfpr/random.hpp"

namespace bfpr {

struct PartitionSpec {
  double ratio = 0.5;
  std::uint64_t seed = 0;

  PartitionSpec(double r, std::uint64_t s) : ratio(r), seed(s) {
    if (!(ratio > 0.0 && ratio < 1.0))
      throw std::invalid_argument("PartitionSpec: ratio must lie in (0,1)");
  }
};

// Seeded uniform shuffle, then prefix split with |D1| = round(r*n) half-up;
// both parts forced nonempty.
inline std::pair<NoisyDataset, NoisyDataset> partition(const NoisyDataset& data,
                                                       const PartitionSpec& spec) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("partition: need at least 2 samples");
  std::size_t n1 = static_cast<std::size_t>(std::floor(spec.ratio * static_cast<double>(n) + 0.5));
  n1 = std::clamp<std::size_t>(n1, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = rng.next_u64() % (i + 1);
    std::swap(order[i], order[j]);
  }

  std::vector<NoisyDataset::Sample> s1, s2;
  s1.reserve(n1);
  s2.reserve(n - n1);
  for (std::size_t i = 0; i < n; ++i)
    (i < n1 ? s1 : s2).push_back(data.samples[order[i]]);
  return {NoisyDataset(std::move(s1), data.bound_lo, data.bound_hi, data.label_kind),
          NoisyDataset(std::move(s2), data.bound_lo, data.bound_hi, data.label_kind)};
}

namespace detail {

// Ratio estimator on already-denoised labels; shared by Psi_FP,1 and Psi_FP,2.
inline EstimateResult ratio_from_denoised(const std::vector<double>& labels,
                                          std::optional<double> epsilon) {
  const double eps = resolve_epsilon(epsilon, labels.size());
  double num = 0.0;
  double below = 0.0;
  for (double s : labels) {
    if (s >= 0.5)
      num += 1.0 - s;
    else
      below += 1.0;
  }
  EstimateResult r;
  r.denominator_clamped = eps > below;
  r.value = num / std::max(eps, below);
  r.n_used = labels.size();
  r.metadata["epsilon"] = std::to_string(eps);
  return r;
}

// Per-category running (sum, count) over D2 in dataset order; adding the
// query on top reproduces the naive dn scan bit-for-bit.
struct CategoryIndex {
  std::unordered_map<std::uint32_t, std::pair<double, double>> cells;

  explicit CategoryIndex(const NoisyDataset& pool) {
    for (const auto& s : pool.samples) {
      auto& cell = cells[s.x.index];
      cell.first += s.y_tilde;
      cell.second += 1.0;
    }
  }

  double denoise(const NoisyDataset::Sample& query) const {
    auto it = cells.find(query.x.index);
    double sum = query.y_tilde;
    double count = 1.0;
    if (it != cells.end()) {
      sum = it->second.first + query.y_tilde;
      count = it->second.second + 1.0;
    }
    return sum / count;
  }
};

}  // namespace detail

// Psi_FP,1: denoise every D1 entry against D2 with dn, then apply the
// prior-free ratio estimator over D1.
inline EstimateResult fpr_denoised(const NoisyDataset& data, const PartitionSpec& spec,
                                   std::optional<double> epsilon = std::nullopt) {
  if (!data.samples.empty() &&
      data.samples.front().x.kind != FeatureValue::Kind::categorical)
    throw std::invalid_argument("fpr_denoised: requires categorical features");
  auto [d1, d2] = partition(data, spec);
  const detail::CategoryIndex index(d2);
  std::vector<double> denoised;
  denoised.reserve(d1.size());
  for (const auto& q : d1.samples) denoised.push_back(index.denoise(q));
  EstimateResult r = detail::ratio_from_denoised(denoised, epsilon);
  r.metadata["estimator"] = "Psi_fp_1";
  r.metadata["partition_ratio"] = std::to_string(spec.ratio);
  return r;
}

namespace detail {

// Sorted-coordinate window index for 1-D Euclidean features. Entries outside
// the bandwidth carry exactly zero weight, so restricting the scan to the
// window and accumulating in original dataset order matches the full scan
// bit-for-bit.
struct Window1DIndex {
  std::vector<std::pair<double, std::size_t>> sorted;  // (coord, original idx)

  explicit Window1DIndex(const NoisyDataset& pool) {
    sorted.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
      sorted.emplace_back(pool.samples[i].x.coords[0], i);
    std::sort(sorted.begin(), sorted.end());
  }

  double denoise(const NoisyDataset::Sample& query, const NoisyDataset& pool,
                 const KernelSpec& kernel, double h) const {
    const double xq = query.x.coords[0];
    auto lo = std::lower_bound(sorted.begin(), sorted.end(),
                               std::make_pair(xq - h, std::size_t{0}));
    auto hi = std::upper_bound(sorted.begin(), sorted.end(),
                               std::make_pair(xq + h, ~std::size_t{0}));
    std::vector<std::size_t> idx;
    idx.reserve(static_cast<std::size_t>(hi - lo));
    for (auto it = lo; it != hi; ++it) idx.push_back(it->second);
    std::sort(idx.begin(), idx.end());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i : idx) {
      const auto& s = pool.samples[i];
      const double w = kernel.weight(std::abs(xq - s.x.coords[0]) / h);
      num += w * s.y_tilde;
      den += w;
    }
    const double wq = kernel.weight(0.0);
    num += wq * query.y_tilde;
    den += wq;
    return num / den;
  }
};

}  // namespace detail

// Psi_FP,2: dn replaced by the NW estimator. h unset means the default
// bandwidth schedule on |D2|.
inline EstimateResult fpr_nw(const NoisyDataset& data, const PartitionSpec& spec,
                             const MetricSpec& metric, const KernelSpec& kernel,
                             std::optional<double> h = std::nullopt,
                             std::optional<double> epsilon = std::nullopt) {
  auto [d1, d2] = partition(data, spec);
  const bool continuous =
      data.samples.front().x.kind == FeatureValue::Kind::continuous;
  const std::size_t m = continuous ? data.samples.front().x.coords.size() : 1;
  const double bandwidth = h ? *h : default_bandwidth(d2.size(), m);
  if (!(bandwidth > 0.0)) throw std::domain_error("fpr_nw: bandwidth must be > 0");

  std::vector<double> denoised;
  denoised.reserve(d1.size());
  if (continuous && m == 1 && !metric.is_discrete()) {
    const detail::Window1DIndex index(d2);
    for (const auto& q : d1.samples)
      denoised.push_back(index.denoise(q, d2, kernel, bandwidth));
  } else {
    for (const auto& q : d1.samples)
      denoised.push_back(nw(q, d2, metric, kernel, bandwidth));
  }
  EstimateResult r = detail::ratio_from_denoised(denoised, epsilon);
  r.metadata["estimator"] = "Psi_fp_2";
  r.metadata["partition_ratio"] = std::to_string(spec.ratio);
  r.metadata["bandwidth"] = std::to_string(bandwidth);
  return r;
}

// Remark-1 adapter: binary labels as Bernoulli(y) noisy labels.
inline NoisyDataset binary_to_noisy(std::vector<NoisyDataset::Sample> samples) {
  for (const auto& s : samples)
    if (s.y_tilde != 0.0 && s.y_tilde != 1.0)
      throw std::domain_error("binary_to_noisy: label not in {0,1}");
  return NoisyDataset(std::move(samples), 0.0, 1.0, LabelKind::binary);
}

// FNR counterparts via the label flip y_tilde -> 1 - y_tilde (dn and nw are
// affine in the labels, so denoise-then-flip equals flip-then-denoise).
inline NoisyDataset flip_labels(const NoisyDataset& data) {
  std::vector<NoisyDataset::Sample> flipped;
  flipped.reserve(data.size());
  for (const auto& s : data.samples) flipped.push_back({s.x, 1.0 - s.y_tilde});
  return NoisyDataset(std::move(flipped), 1.0 - data.bound_hi, 1.0 - data.bound_lo,
                      data.label_kind == LabelKind::binary ? LabelKind::binary
                                                          : LabelKind::continuous);
}

inline EstimateResult fnr_denoised(const NoisyDataset& data, const PartitionSpec& spec,
                                   std::optional<double> epsilon = std::nullopt) {
  EstimateResult r = fpr_denoised(flip_labels(data), spec, epsilon);
  r.metadata["estimator"] = "Psi_fn_1";
  return r;
}

inline EstimateResult fnr_nw(const NoisyDataset& data, const PartitionSpec& spec,
                             const MetricSpec& metric, const KernelSpec& kernel,
                             std::optional<double> h = std::nullopt,
                             std::optional<double> epsilon = std::nullopt) {
  EstimateResult r = fpr_nw(flip_labels(data), spec, metric, kernel, h, epsilon);
  r.metadata["estimator"] = "Psi_fn_2";
  return r;
}

}  // namespace bfpr

#endif  // BFPR_NOISY_HPP
