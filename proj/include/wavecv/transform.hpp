#pragma once

// Decimated orthogonal wavelet transform with periodic boundaries, computed
// by the pyramid algorithm.  Detail level j holds 2^j coefficients; the
// scaling block at level j0 holds 2^j0.  Total coefficients = n = 2^J.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavecv/filters.hpp"
#include "wavecv/signal.hpp"

namespace wavecv {

struct WaveletDecomposition {
  std::vector<double> coarse;                // 2^j0 scaling coefficients
  std::vector<std::vector<double>> details;  // details[i] = level j0+i
  int j0 = 0;
  FilterBank filter;

  int level_count() const { return static_cast<int>(details.size()); }
  int J() const { return j0 + level_count(); }
  std::size_t n() const { return std::size_t{1} << J(); }

  std::vector<double>& detail(int j) { return details.at(static_cast<std::size_t>(j - j0)); }
  const std::vector<double>& detail(int j) const {
    return details.at(static_cast<std::size_t>(j - j0));
  }
  const std::vector<double>& finest() const { return details.back(); }
};

// Coarsest thresholded level: J - offset, clamped to [0, J-1].
inline int default_j0(int J, int offset = 4) {
  int j0 = J - offset;
  if (j0 < 0) j0 = 0;
  if (j0 > J - 1) j0 = J - 1;
  return j0;
}

namespace detail {

// One analysis stage: m samples -> m/2 approximations + m/2 details.
// Periodic convolution; the filter may wrap the signal several times.
inline void analysis_step(const std::vector<double>& a, const FilterBank& f,
                          std::vector<double>& approx, std::vector<double>& det) {
  const std::size_t m = a.size(), half = m / 2, L = f.lowpass.size();
  approx.assign(half, 0.0);
  det.assign(half, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    double s = 0.0, d = 0.0;
    std::size_t idx = 2 * k;
    if (idx >= m) idx -= m;
    for (std::size_t l = 0; l < L; ++l) {
      s += f.lowpass[l] * a[idx];
      d += f.highpass[l] * a[idx];
      if (++idx == m) idx = 0;
    }
    approx[k] = s;
    det[k] = d;
  }
}

// One synthesis stage: m/2 approximations + m/2 details -> m samples.
inline void synthesis_step(const std::vector<double>& approx, const std::vector<double>& det,
                           const FilterBank& f, std::vector<double>& a) {
  const std::size_t half = approx.size(), m = 2 * half, L = f.lowpass.size();
  a.assign(m, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    std::size_t idx = 2 * k;
    if (idx >= m) idx -= m;
    for (std::size_t l = 0; l < L; ++l) {
      a[idx] += f.lowpass[l] * approx[k] + f.highpass[l] * det[k];
      if (++idx == m) idx = 0;
    }
  }
}

}  // namespace detail

inline WaveletDecomposition dwt(const Signal& y, const FilterBank& filter, int j0) {
  const int J = dyadic_log2(y.size());
  if (J < 1) throw std::invalid_argument("dwt: need at least 2 samples");
  if (j0 < 0 || j0 > J - 1)
    throw std::invalid_argument("dwt: j0 must lie in [0, " + std::to_string(J - 1) + "]");
  WaveletDecomposition d;
  d.j0 = j0;
  d.filter = filter;
  d.details.resize(static_cast<std::size_t>(J - j0));
  std::vector<double> a = y, approx;
  for (int j = J - 1; j >= j0; --j) {
    detail::analysis_step(a, filter, approx, d.details[static_cast<std::size_t>(j - j0)]);
    a.swap(approx);
  }
  d.coarse = std::move(a);
  return d;
}

namespace detail {

inline void validate_structure(const WaveletDecomposition& d) {
  if (d.details.empty()) throw std::invalid_argument("decomposition has no detail levels");
  if (d.coarse.size() != (std::size_t{1} << d.j0))
    throw std::invalid_argument("scaling block size does not match j0");
  for (int i = 0; i < d.level_count(); ++i)
    if (d.details[static_cast<std::size_t>(i)].size() != (std::size_t{1} << (d.j0 + i)))
      throw std::invalid_argument("detail level " + std::to_string(d.j0 + i) + " has wrong length");
}

}  // namespace detail

inline Signal idwt(const WaveletDecomposition& d) {
  detail::validate_structure(d);
  std::vector<double> a = d.coarse, next;
  for (int j = d.j0; j < d.J(); ++j) {
    detail::synthesis_step(a, d.detail(j), d.filter, next);
    a.swap(next);
  }
  return a;
}

// Coefficients as one vector: scaling block, then details coarsest to finest.
inline std::vector<double> flatten(const WaveletDecomposition& d) {
  std::vector<double> out;
  out.reserve(d.n());
  out.insert(out.end(), d.coarse.begin(), d.coarse.end());
  for (const auto& lvl : d.details) out.insert(out.end(), lvl.begin(), lvl.end());
  return out;
}

}  // namespace wavecv
