#ifndef BFPR_DENOISE_HPP
#define BFPR_DENOISE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bfpr/dataset.hpp"

namespace bfpr {

// Metric on the feature space: discrete (0/1), Euclidean on coordinates, or
// a user table over a finite space.
class MetricSpec {
 public:
  static MetricSpec discrete() { return MetricSpec(Kind::discrete, {}); }
  static MetricSpec euclidean() { return MetricSpec(Kind::euclidean, {}); }

  // table[i*k + j] = d(i, j) for a k-category space.
  static MetricSpec table(std::vector<double> distances, std::size_t k) {
    if (distances.size() != k * k)
      throw std::invalid_argument("MetricSpec: table must be k*k");
    MetricSpec m(Kind::table, std::move(distances));
    m.k_ = k;
    return m;
  }

  double operator()(const FeatureValue& u, const FeatureValue& v) const {
    switch (kind_) {
      case Kind::discrete:
        return u == v ? 0.0 : 1.0;
      case Kind::euclidean: {
        if (u.kind != FeatureValue::Kind::continuous ||
            v.kind != FeatureValue::Kind::continuous)
          throw std::invalid_argument("euclidean metric needs continuous features");
        double acc = 0.0;
        for (std::size_t i = 0; i < u.coords.size(); ++i) {
          const double d = u.coords[i] - v.coords[i];
          acc += d * d;
        }
        return std::sqrt(acc);
      }
      case Kind::table:
        return table_[u.index * k_ + v.index];
    }
    throw std::logic_error("unreachable");
  }

  bool is_discrete() const { return kind_ == Kind::discrete; }

 private:
  enum class Kind { discrete, euclidean, table };
  MetricSpec(Kind k, std::vector<double> t) : kind_(k), table_(std::move(t)) {}

  Kind kind_;
  std::vector<double> table_;
  std::size_t k_ = 0;
};

// Kernel on [0,1]: strictly decreasing, Lipschitz with constant L, and with
// slope bounded away from zero (-K'(t) > theta). Conditions are verified on a
// 1024-point grid at construction; user kernels cannot silently violate them.
class KernelSpec {
 public:
  KernelSpec(std::function<double(double)> k, double lipschitz, double slope_floor)
      : eval_(std::move(k)), lipschitz_(lipschitz), slope_floor_(slope_floor) {
    if (!(slope_floor_ > 0.0)) throw std::invalid_argument("KernelSpec: theta must be > 0");
    if (!(eval_(0.0) > 0.0)) throw std::invalid_argument("KernelSpec: K(0) must be > 0");
    constexpr int grid = 1024;
    constexpr double tol = 1e-9;
    double prev = eval_(0.0);
    for (int i = 1; i <= grid; ++i) {
      const double t = static_cast<double>(i) / grid;
      const double cur = eval_(t);
      if (cur < 0.0) throw std::invalid_argument("KernelSpec: K must be nonnegative");
      const double slope = (cur - prev) * grid;
      if (slope >= -slope_floor_ + tol)
        throw std::invalid_argument("KernelSpec: slope floor -K' > theta violated");
      if (std::abs(slope) > lipschitz_ + tol)
        throw std::invalid_argument("KernelSpec: Lipschitz constant violated");
      prev = cur;
    }
  }

  // Triangular kernel K(t) = 1 - t; the only elementary kernel meeting the
  // slope-floor condition, and the one that reduces nw to dn.
  static KernelSpec triangular() {
    return KernelSpec([](double t) { return 1.0 - t; }, 1.0, 0.5);
  }

  // Support is [0,1]; outside it the weight is exactly zero.
  double weight(double t) const { return t > 1.0 ? 0.0 : eval_(t); }

 private:
  std::function<double(double)> eval_;
  double lipschitz_;
  double slope_floor_;
};

// dn: average of all noisy labels sharing the query's exact feature value,
// over the pool D2 plus the query itself (so the denominator is >= 1).
inline double dn(const NoisyDataset::Sample& query, const NoisyDataset& pool) {
  if (query.x.kind != FeatureValue::Kind::categorical)
    throw std::invalid_argument("dn: requires categorical features (use nw)");
  double sum = 0.0;
  double count = 0.0;
  for (const auto& s : pool.samples) {
    if (s.x.index == query.x.index) {
      sum += s.y_tilde;
      count += 1.0;
    }
  }
  sum += query.y_tilde;
  count += 1.0;
  return sum / count;
}

// Nadaraya-Watson local average over the pool D2 plus the query. The query
// contributes weight K(0) > 0, so the denominator is always positive.
inline double nw(const NoisyDataset::Sample& query, const NoisyDataset& pool,
                 const MetricSpec& metric, const KernelSpec& kernel, double h) {
  if (!(h > 0.0)) throw std::domain_error("nw: bandwidth must be > 0");
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : pool.samples) {
    const double w = kernel.weight(metric(query.x, s.x) / h);
    num += w * s.y_tilde;
    den += w;
  }
  const double wq = kernel.weight(0.0);
  num += wq * query.y_tilde;
  den += wq;
  return num / den;
}

// Bandwidth schedule h = (ln n / n)^(1/(m+2)); satisfies h -> 0 and
// ln n / (n h^m) -> 0.
inline double default_bandwidth(std::size_t n, std::size_t m) {
  if (n < 2 || m < 1) throw std::invalid_argument("default_bandwidth: need n >= 2, m >= 1");
  const double nn = static_cast<double>(n);
  return std::pow(std::log(nn) / nn, 1.0 / static_cast<double>(m + 2));
}

}  // namespace bfpr

#endif  // BFPR_DENOISE_HPP
