#ifndef BFPR_DATASET_HPP
#define BFPR_DATASET_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfpr {

// A feature is either a category index (finite feature space) or a real
// vector. A dataset is homogeneous in kind and dimension.
struct FeatureValue {
  enum class Kind { categorical, continuous };

  Kind kind = Kind::categorical;
  std::uint32_t index = 0;
  std::vector<double> coords;

  static FeatureValue category(std::uint32_t i) {
    FeatureValue f;
    f.kind = Kind::categorical;
    f.index = i;
    return f;
  }
  static FeatureValue point(std::vector<double> c) {
    FeatureValue f;
    f.kind = Kind::continuous;
    f.coords = std::move(c);
    return f;
  }

  bool operator==(const FeatureValue& o) const {
    if (kind != o.kind) return false;
    return kind == Kind::categorical ? index == o.index : coords == o.coords;
  }
};

template <class SampleT>
void check_homogeneous(const std::vector<SampleT>& samples) {
  if (samples.empty()) throw std::invalid_argument("dataset: needs at least one sample");
  const FeatureValue& first = samples.front().x;
  for (const auto& s : samples) {
    if (s.x.kind != first.kind)
      throw std::invalid_argument("dataset: mixed feature kinds");
    if (s.x.kind == FeatureValue::Kind::continuous &&
        s.x.coords.size() != first.coords.size())
      throw std::invalid_argument("dataset: mixed feature dimensions");
  }
}

// Soft labels: y is the posterior probability of class 1.
struct SoftDataset {
  struct Sample {
    FeatureValue x;
    double y;
  };

  std::vector<Sample> samples;

  SoftDataset() = default;
  explicit SoftDataset(std::vector<Sample> s) : samples(std::move(s)) {
    check_homogeneous(samples);
    for (const auto& smp : samples)
      if (!(smp.y >= 0.0 && smp.y <= 1.0))
        throw std::invalid_argument("SoftDataset: label outside [0,1]");
  }

  std::size_t size() const { return samples.size(); }
};

enum class LabelKind { continuous, binary };

// Noisy labels: E[y_tilde | y] = y, bounded in [a,b].
struct NoisyDataset {
  struct Sample {
    FeatureValue x;
    double y_tilde;
  };

  std::vector<Sample> samples;
  double bound_lo = 0.0;
  double bound_hi = 1.0;
  LabelKind label_kind = LabelKind::continuous;

  NoisyDataset() = default;
  NoisyDataset(std::vector<Sample> s, double a, double b,
               LabelKind kind = LabelKind::continuous)
      : samples(std::move(s)), bound_lo(a), bound_hi(b), label_kind(kind) {
    check_homogeneous(samples);
    if (!(std::isfinite(a) && std::isfinite(b) && a <= b))
      throw std::invalid_argument("NoisyDataset: bad bounds");
    for (const auto& smp : samples) {
      if (!(smp.y_tilde >= a && smp.y_tilde <= b))
        throw std::invalid_argument("NoisyDataset: label outside bounds");
      if (kind == LabelKind::binary && smp.y_tilde != 0.0 && smp.y_tilde != 1.0)
        throw std::invalid_argument("NoisyDataset: binary label not in {0,1}");
    }
    if (kind == LabelKind::binary && (a != 0.0 || b != 1.0))
      throw std::invalid_argument("NoisyDataset: binary bounds must be (0,1)");
  }

  std::size_t size() const { return samples.size(); }
};

struct ClassPrior {
  double p0;

  explicit ClassPrior(double p0_) : p0(p0_) {
    if (!(p0 > 0.0 && p0 < 1.0))
      throw std::invalid_argument("ClassPrior: p0 must lie in (0,1)");
  }
  double p1() const { return 1.0 - p0; }
};

struct EstimateResult {
  double value = 0.0;
  bool denominator_clamped = false;
  std::size_t n_used = 0;
  std::map<std::string, std::string> metadata;
};

}  // namespace bfpr

#endif  // BFPR_DATASET_HPP
