#pragma once

// Coefficient shrinkage rules, noise-scale estimation, block partitions, and
// the classical wavelet regression baselines built from them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavecv/transform.hpp"

namespace wavecv {

enum class ThresholdRule { soft, hard };

inline double soft_threshold(double c, double lambda) {
  const double a = std::abs(c) - lambda;
  if (a <= 0.0) return 0.0;
  return c < 0.0 ? -a : a;
}

// Keep-or-kill; the boundary |c| = lambda kills.
inline double hard_threshold(double c, double lambda) {
  return std::abs(c) > lambda ? c : 0.0;
}

inline void apply_rule(std::vector<double>& coeffs, double lambda, ThresholdRule rule) {
  if (rule == ThresholdRule::soft) {
    for (double& c : coeffs) c = soft_threshold(c, lambda);
  } else {
    for (double& c : coeffs) c = hard_threshold(c, lambda);
  }
}

// sigma * sqrt(2 ln n).  A degenerate zero scale yields a zero threshold.
inline double universal_threshold(double sigma, std::size_t n) {
  if (sigma < 0.0) throw std::invalid_argument("universal_threshold: sigma must be >= 0");
  if (n < 2) throw std::invalid_argument("universal_threshold: n must be >= 2");
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty vector");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid) - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

}  // namespace detail

// Noise scale from the finest detail level: median absolute deviation about
// the median, divided by 0.6745.
inline double estimate_sigma(const WaveletDecomposition& d) {
  if (d.details.empty()) throw std::invalid_argument("estimate_sigma: no detail levels");
  const std::vector<double>& fine = d.finest();
  const double med = detail::median_of(fine);
  std::vector<double> dev(fine.size());
  for (std::size_t k = 0; k < fine.size(); ++k) dev[k] = std::abs(fine[k] - med);
  return detail::median_of(std::move(dev)) / 0.6745;
}

// Stein's unbiased risk estimate for the soft rule at threshold t, on
// coefficients standardized by sigma:
//   SURE(t) = m - 2*#{|x_k| <= t} + sum_k min(x_k^2, t^2)
// minimized exactly over the candidate set {0} u {|x_k|}; ties take the
// smaller threshold.  Returns the threshold on the original scale.
inline double sure_level_threshold(const std::vector<double>& coeffs, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("sure_level_threshold: sigma must be > 0");
  if (coeffs.empty()) return 0.0;
  const std::size_t m = coeffs.size();
  std::vector<double> x(m);
  for (std::size_t k = 0; k < m; ++k) x[k] = std::abs(coeffs[k]) / sigma;

  std::vector<double> candidates;
  candidates.reserve(m + 1);
  candidates.push_back(0.0);
  candidates.insert(candidates.end(), x.begin(), x.end());
  std::sort(candidates.begin(), candidates.end());

  double best_t = 0.0, best_risk = 0.0;
  bool first = true;
  for (double t : candidates) {
    const double t2 = t * t;
    std::size_t inside = 0;
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double x2 = x[k] * x[k];
      if (x[k] <= t) {
        ++inside;
        acc += x2;
      } else {
        acc += t2;
      }
    }
    const double risk = static_cast<double>(m) - 2.0 * static_cast<double>(inside) + acc;
    if (first || risk < best_risk) {
      first = false;
      best_risk = risk;
      best_t = t;
    }
  }
  return best_t * sigma;
}

// Sparsity test deciding whether SURE is unreliable on a level:
//   m^{-1} sum(d_k^2/sigma^2 - 1) <= m^{-1/2} (log2 m)^{3/2}
inline bool level_is_sparse(const std::vector<double>& coeffs, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("level_is_sparse: sigma must be > 0");
  if (coeffs.empty()) throw std::invalid_argument("level_is_sparse: empty level");
  const double m = static_cast<double>(coeffs.size());
  double lhs = 0.0;
  for (double c : coeffs) lhs += c * c / (sigma * sigma) - 1.0;
  lhs /= m;
  const double rhs = std::pow(std::log2(m), 1.5) / std::sqrt(m);
  return lhs <= rhs;
}

// ---------------------------------------------------------------------------
// Blocks

struct IndexRange {
  std::size_t begin = 0, end = 0;  // half-open
  std::size_t length() const { return end - begin; }
};

// Block length: the power of two in {2,4,8,...} closest to ln n, ties upward.
inline std::size_t dyadic_block_length(std::size_t n) {
  if (n < 2) throw std::invalid_argument("dyadic_block_length: n must be >= 2");
  const double target = std::log(static_cast<double>(n));
  std::size_t best = 2;
  double best_dist = std::abs(2.0 - target);
  for (std::size_t L = 4;; L <<= 1) {
    const double dist = std::abs(static_cast<double>(L) - target);
    if (dist > best_dist) break;  // distances are unimodal in L
    best = L;                     // <= keeps ties upward
    best_dist = dist;
  }
  return best;
}

// Contiguous blocks of L coefficients per detail level; a level shorter than
// L forms a single short block.
struct BlockPartition {
  std::size_t block_size = 0;  // L
  int j0 = 0;
  std::vector<std::vector<IndexRange>> levels;  // levels[i] covers level j0+i

  const std::vector<IndexRange>& at(int j) const {
    return levels.at(static_cast<std::size_t>(j - j0));
  }
};

inline BlockPartition make_block_partition(std::size_t n, int j0) {
  const int J = dyadic_log2(n);
  if (j0 < 0 || j0 > J - 1) throw std::invalid_argument("make_block_partition: j0 out of range");
  BlockPartition p;
  p.block_size = dyadic_block_length(n);
  p.j0 = j0;
  p.levels.resize(static_cast<std::size_t>(J - j0));
  for (int j = j0; j < J; ++j) {
    const std::size_t len = std::size_t{1} << j;
    auto& blocks = p.levels[static_cast<std::size_t>(j - j0)];
    if (len <= p.block_size) {
      blocks.push_back({0, len});
    } else {
      for (std::size_t b = 0; b < len; b += p.block_size)
        blocks.push_back({b, b + p.block_size});
    }
  }
  return p;
}

// Keep a block iff its energy exceeds lambda, prorated for short blocks:
// keep iff sum(c^2) > lambda * len/L.  The boundary kills.  Returns the
// number of coefficients sitting in kept blocks.
inline std::size_t block_project(std::vector<double>& coeffs,
                                 const std::vector<IndexRange>& blocks, double lambda,
                                 std::size_t block_size) {
  std::size_t kept = 0;
  for (const IndexRange& b : blocks) {
    if (b.end > coeffs.size()) throw std::invalid_argument("block_project: range out of bounds");
    double energy = 0.0;
    for (std::size_t k = b.begin; k < b.end; ++k) energy += coeffs[k] * coeffs[k];
    const double cut =
        lambda * static_cast<double>(b.length()) / static_cast<double>(block_size);
    if (energy > cut)
      kept += b.length();
    else
      for (std::size_t k = b.begin; k < b.end; ++k) coeffs[k] = 0.0;
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Per-level threshold profiles

enum class ThresholdScale { amplitude, sum_of_squares };

struct ThresholdProfile {
  int j0 = 0;                  // first covered level
  std::vector<double> lambda;  // lambda[i] applies to level j0+i
  ThresholdScale scale = ThresholdScale::amplitude;

  int level_count() const { return static_cast<int>(lambda.size()); }
  double at(int j) const { return lambda.at(static_cast<std::size_t>(j - j0)); }
  double& at(int j) { return lambda.at(static_cast<std::size_t>(j - j0)); }
};

// ---------------------------------------------------------------------------
// Classical baselines.  Each returns a thresholded copy; the scaling block is
// never modified.

inline WaveletDecomposition apply_profile(const WaveletDecomposition& d,
                                          const ThresholdProfile& p, ThresholdRule rule) {
  if (p.j0 != d.j0 || p.level_count() != static_cast<int>(d.details.size()))
    throw std::invalid_argument("apply_profile: profile does not cover the detail levels");
  WaveletDecomposition out = d;
  for (int j = d.j0; j < d.J(); ++j) apply_rule(out.detail(j), p.at(j), rule);
  return out;
}

namespace detail {

inline ThresholdProfile amplitude_profile(const WaveletDecomposition& d) {
  ThresholdProfile p;
  p.j0 = d.j0;
  p.lambda.assign(d.details.size(), 0.0);
  p.scale = ThresholdScale::amplitude;
  return p;
}

}  // namespace detail

// One universal threshold sigma-hat * sqrt(2 log n) on every level.
inline ThresholdProfile visushrink_profile(const WaveletDecomposition& d) {
  ThresholdProfile p = detail::amplitude_profile(d);
  const double lambda = universal_threshold(estimate_sigma(d), d.n());
  for (double& l : p.lambda) l = lambda;
  return p;
}

// Per-level SURE-minimizing thresholds.  A zero noise estimate leaves the
// zero profile (identity under either rule).
inline ThresholdProfile sureshrink_profile(const WaveletDecomposition& d) {
  ThresholdProfile p = detail::amplitude_profile(d);
  const double sigma = estimate_sigma(d);
  if (sigma == 0.0) return p;
  for (int j = d.j0; j < d.J(); ++j) p.at(j) = sure_level_threshold(d.detail(j), sigma);
  return p;
}

// SURE per level, with the universal threshold substituted where the level
// looks too sparse for SURE to be reliable.
inline ThresholdProfile hybridshrink_profile(const WaveletDecomposition& d) {
  ThresholdProfile p = detail::amplitude_profile(d);
  const double sigma = estimate_sigma(d);
  if (sigma == 0.0) return p;
  const double universal = universal_threshold(sigma, d.n());
  for (int j = d.j0; j < d.J(); ++j) {
    const auto& lvl = d.detail(j);
    p.at(j) = level_is_sparse(lvl, sigma) ? universal : sure_level_threshold(lvl, sigma);
  }
  return p;
}

inline WaveletDecomposition visushrink(const WaveletDecomposition& d, ThresholdRule rule) {
  return apply_profile(d, visushrink_profile(d), rule);
}

inline WaveletDecomposition sureshrink(const WaveletDecomposition& d) {
  return apply_profile(d, sureshrink_profile(d), ThresholdRule::soft);
}

inline WaveletDecomposition hybridshrink(const WaveletDecomposition& d) {
  return apply_profile(d, hybridshrink_profile(d), ThresholdRule::soft);
}

}  // namespace wavecv
