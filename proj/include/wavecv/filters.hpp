#pragma once

// Orthonormal two-channel filter banks.  Scaling taps sum to sqrt(2); the
// wavelet taps are the quadrature mirror g[k] = (-1)^k h[L-1-k].
// Full-precision tap tables are documented in docs/filters.md.

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wavecv {

struct FilterBank {
  std::string name;
  std::vector<double> lowpass;   // scaling taps h
  std::vector<double> highpass;  // wavelet taps g
};

inline FilterBank build_filter(std::string_view name) {
  FilterBank f;
  if (name == "haar") {
    const double s = 1.0 / std::sqrt(2.0);
    f.lowpass = {s, s};
  } else if (name == "la8") {
    // Daubechies least-asymmetric, 8 taps.
    f.lowpass = {-0.07576571478927333, -0.02963552764599851,
                 0.49761866763201545,  0.80373875180591614,
                 0.29785779560527736,  -0.09921954357684722,
                 -0.01260396726203783, 0.03222310060404270};
  } else {
    throw std::invalid_argument("unknown filter: " + std::string(name));
  }
  f.name = name;
  const std::size_t L = f.lowpass.size();
  f.highpass.resize(L);
  for (std::size_t k = 0; k < L; ++k) {
    const double h = f.lowpass[L - 1 - k];
    f.highpass[k] = (k % 2 == 0) ? h : -h;
  }
  return f;
}

}  // namespace wavecv
