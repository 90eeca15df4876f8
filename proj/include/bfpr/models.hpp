#ifndef BFPR_MODELS_HPP
#define BFPR_MODELS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bfpr/dataset.hpp"
#include "bfpr/random.hpp"
#include "bfpr/stats.hpp"

namespace bfpr {

// Finite-categorical feature law with a posterior value per category.
struct FiniteModel {
  std::vector<double> p_x;
  std::vector<double> posterior;

  FiniteModel(std::vector<double> px, std::vector<double> post)
      : p_x(std::move(px)), posterior(std::move(post)) {
    if (p_x.empty() || p_x.size() != posterior.size())
      throw std::invalid_argument("FiniteModel: p_x and posterior sizes must match");
    double total = 0.0;
    for (double p : p_x) {
      if (p < 0.0) throw std::invalid_argument("FiniteModel: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("FiniteModel: p_x must sum to 1");
    for (double q : posterior)
      if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("FiniteModel: posterior outside [0,1]");
  }
};

// Uniform feature law on [0,1] with a smooth posterior and declared Hölder
// constants (C, beta). The certificate is checked on a dense grid.
struct Smooth1DModel {
  std::function<double(double)> posterior;
  double holder_c;
  double holder_beta;
  std::string name;

  Smooth1DModel(std::function<double(double)> f, double c, double beta, std::string nm)
      : posterior(std::move(f)), holder_c(c), holder_beta(beta), name(std::move(nm)) {
    if (!(holder_c > 0.0) || !(holder_beta > 0.0))
      throw std::invalid_argument("Smooth1DModel: Hölder constants must be positive");
    constexpr int grid = 10000;
    for (int i = 0; i <= grid; ++i) {
      const double x = static_cast<double>(i) / grid;
      const double y = posterior(x);
      if (!(y >= 0.0 && y <= 1.0))
        throw std::invalid_argument("Smooth1DModel: posterior outside [0,1]");
      if (i > 0) {
        const double xp = static_cast<double>(i - 1) / grid;
        const double lhs = std::abs(y - posterior(xp));
        if (lhs > holder_c * std::pow(x - xp, holder_beta) + 1e-9)
          throw std::invalid_argument("Smooth1DModel: Hölder certificate failed");
      }
    }
  }

  // Stock model: crosses 0.5 transversally, so Pr(y = 0.5) = 0.
  static Smooth1DModel stock_sine() {
    return Smooth1DModel(
        [](double x) { return 0.5 + 0.4 * std::sin(6.283185307179586476925286766559 * x); },
        0.8 * 3.14159265358979323846264338328, 1.0, "sine");
  }
};

using GenerativeModel = std::variant<FiniteModel, Smooth1DModel>;

// Label-noise channels; every variant has E[y_tilde | y] = y analytically.
// Clipping into [0,1] is deliberately not offered: it would bias the
// conditional mean.
struct UniformAdditiveNoise {
  double sigma;
  explicit UniformAdditiveNoise(double s) : sigma(s) {
    if (!(sigma > 0.0)) throw std::invalid_argument("UniformAdditiveNoise: sigma must be > 0");
  }
};

struct TruncGaussNoise {
  double sigma;
  double cut;
  TruncGaussNoise(double s, double c) : sigma(s), cut(c) {
    if (!(sigma > 0.0) || !(cut > 0.0))
      throw std::invalid_argument("TruncGaussNoise: sigma and cut must be > 0");
  }
};

struct BernoulliBinaryNoise {};

using NoiseModel = std::variant<UniformAdditiveNoise, TruncGaussNoise, BernoulliBinaryNoise>;

inline std::pair<double, double> noise_bounds(const NoiseModel& noise) {
  return std::visit(
      [](const auto& nm) -> std::pair<double, double> {
        using T = std::decay_t<decltype(nm)>;
        if constexpr (std::is_same_v<T, UniformAdditiveNoise>)
          return {-nm.sigma, 1.0 + nm.sigma};
        else if constexpr (std::is_same_v<T, TruncGaussNoise>)
          return {-nm.cut, 1.0 + nm.cut};
        else
          return {0.0, 1.0};
      },
      noise);
}

inline LabelKind noise_label_kind(const NoiseModel& noise) {
  return std::holds_alternative<BernoulliBinaryNoise>(noise) ? LabelKind::binary
                                                             : LabelKind::continuous;
}

inline double apply_noise(const NoiseModel& noise, double y, Rng& rng) {
  return std::visit(
      [&](const auto& nm) -> double {
        using T = std::decay_t<decltype(nm)>;
        if constexpr (std::is_same_v<T, UniformAdditiveNoise>) {
          return y + nm.sigma * (2.0 * rng.uniform() - 1.0);
        } else if constexpr (std::is_same_v<T, TruncGaussNoise>) {
          // Symmetric truncation keeps the mean at exactly zero.
          double z;
          do {
            z = nm.sigma * rng.normal();
          } while (std::abs(z) > nm.cut);
          return y + z;
        } else {
          return rng.uniform() < y ? 1.0 : 0.0;
        }
      },
      noise);
}

namespace detail {

inline std::size_t sample_category(const FiniteModel& model, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < model.p_x.size(); ++i) {
    acc += model.p_x[i];
    if (u < acc) return i;
  }
  return model.p_x.size() - 1;
}

}  // namespace detail

inline SoftDataset sample_soft(const GenerativeModel& model, std::size_t n,
                               std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_soft: n >= 1 required");
  Rng rng(seed);
  std::vector<SoftDataset::Sample> samples;
  samples.reserve(n);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        for (std::size_t i = 0; i < n; ++i) {
          if constexpr (std::is_same_v<T, FiniteModel>) {
            const std::size_t c = detail::sample_category(m, rng);
            samples.push_back(
                {FeatureValue::category(static_cast<std::uint32_t>(c)), m.posterior[c]});
          } else {
            const double x = rng.uniform();
            samples.push_back({FeatureValue::point({x}), m.posterior(x)});
          }
        }
      },
      model);
  return SoftDataset(std::move(samples));
}

inline NoisyDataset sample_noisy(const GenerativeModel& model, const NoiseModel& noise,
                                 std::size_t n, std::uint64_t seed) {
  const SoftDataset soft = sample_soft(model, n, seed);
  Rng rng(seed ^ 0xdd51e4f2c6a8b317ULL);  // independent noise stream
  std::vector<NoisyDataset::Sample> samples;
  samples.reserve(n);
  for (const auto& s : soft.samples)
    samples.push_back({s.x, apply_noise(noise, s.y, rng)});
  const auto [a, b] = noise_bounds(noise);
  return NoisyDataset(std::move(samples), a, b, noise_label_kind(noise));
}

// The paper's two readings of p_c(0): the class-mass E[1-y] (the Eq.-(8)
// normalizer, used as ground truth) and the threshold mass Pr(y < 0.5).
struct PriorPair {
  double p0_mass;
  double p0_threshold;
};

namespace detail {

// Adaptive Simpson on a smooth integrand.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Split [0,1] at the crossings of posterior(x) = 0.5 so each quadrature
// piece has a constant indicator. Crossings located by grid scan + bisection.
inline std::vector<double> crossing_breakpoints(const Smooth1DModel& m) {
  constexpr int grid = 4096;
  std::vector<double> pts = {0.0};
  auto g = [&](double x) { return m.posterior(x) - 0.5; };
  for (int i = 0; i < grid; ++i) {
    double lo = static_cast<double>(i) / grid;
    double hi = static_cast<double>(i + 1) / grid;
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) {
      pts.push_back(lo);
      continue;
    }
    if (glo * ghi < 0.0) {
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        (glo * gm < 0.0 ? hi : lo) = mid;
        if (glo * gm >= 0.0) glo = gm;
      }
      pts.push_back(0.5 * (lo + hi));
    }
  }
  pts.push_back(1.0);
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace detail

constexpr double kQuadratureTol = 1e-9;

namespace detail {

inline PriorPair compute_prior(const GenerativeModel& model) {
  PriorPair pp{};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FiniteModel>) {
          double mass = 0.0, thresh = 0.0;
          for (std::size_t i = 0; i < m.p_x.size(); ++i) {
            mass += m.p_x[i] * (1.0 - m.posterior[i]);
            if (m.posterior[i] < 0.5) thresh += m.p_x[i];
          }
          pp = {mass, thresh};
        } else {
          const auto pts = detail::crossing_breakpoints(m);
          double mass = 0.0, thresh = 0.0;
          for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double mid = 0.5 * (pts[i] + pts[i + 1]);
            mass += detail::integrate([&](double x) { return 1.0 - m.posterior(x); },
                                      pts[i], pts[i + 1], kQuadratureTol);
            if (m.posterior(mid) < 0.5) thresh += pts[i + 1] - pts[i];
          }
          pp = {mass, thresh};
        }
      },
      model);
  if (!(pp.p0_mass > 0.0 && pp.p0_mass < 1.0))
    throw std::invalid_argument("model is degenerate: class-0 mass E[1-y] is 0 or 1");
  return pp;
}

}  // namespace detail

// Both priors, with full validation: the class mass and the threshold mass
// must each leave both classes nonempty.
inline PriorPair exact_prior(const GenerativeModel& model) {
  const PriorPair pp = detail::compute_prior(model);
  if (!(pp.p0_threshold > 0.0 && pp.p0_threshold < 1.0))
    throw std::invalid_argument("model is degenerate: Pr(y < 0.5) is 0 or 1");
  return pp;
}

// Exact rho_FP of the Bayes classifier: E[1{y>=0.5}(1-y)] / E[1-y].
// Finite models sum; 1-D smooth models integrate by adaptive quadrature.
// Only the class mass needs to be nondegenerate here.
inline double exact_fpr(const GenerativeModel& model) {
  const PriorPair prior = detail::compute_prior(model);
  double num = 0.0;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FiniteModel>) {
          for (std::size_t i = 0; i < m.p_x.size(); ++i)
            if (m.posterior[i] >= 0.5) num += m.p_x[i] * (1.0 - m.posterior[i]);
        } else {
          const auto pts = detail::crossing_breakpoints(m);
          for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double mid = 0.5 * (pts[i] + pts[i + 1]);
            if (m.posterior(mid) >= 0.5)
              num += detail::integrate([&](double x) { return 1.0 - m.posterior(x); },
                                       pts[i], pts[i + 1], kQuadratureTol);
          }
        }
      },
      model);
  return num / prior.p0_mass;
}

// Exact rho_FN: E[1{y<0.5} y] / E[y].
inline double exact_fnr(const GenerativeModel& model) {
  const PriorPair prior = detail::compute_prior(model);
  double num = 0.0;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FiniteModel>) {
          for (std::size_t i = 0; i < m.p_x.size(); ++i)
            if (m.posterior[i] < 0.5) num += m.p_x[i] * m.posterior[i];
        } else {
          const auto pts = detail::crossing_breakpoints(m);
          for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double mid = 0.5 * (pts[i] + pts[i + 1]);
            if (m.posterior(mid) < 0.5)
              num += detail::integrate([&](double x) { return m.posterior(x); }, pts[i],
                                       pts[i + 1], kQuadratureTol);
          }
        }
      },
      model);
  return num / (1.0 - prior.p0_mass);
}

}  // namespace bfpr

#endif  // BFPR_MODELS_HPP
