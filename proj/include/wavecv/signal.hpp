#pragma once

// Signal containers and dyadic-length padding.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavecv {

using Signal = std::vector<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// log2 of a power of two; throws otherwise.
inline int dyadic_log2(std::size_t n) {
  if (!is_power_of_two(n))
    throw std::invalid_argument("length must be a power of two, got " + std::to_string(n));
  int j = 0;
  while ((std::size_t{1} << j) < n) ++j;
  return j;
}

// A series extended to the next power of two.  `offset` and `original_length`
// locate the untouched input inside `padded`.
struct PaddedSignal {
  Signal padded;
  std::size_t offset = 0;
  std::size_t original_length = 0;
};

namespace detail {

// Reflect an unbounded index into [0, m) about the end samples without
// repeating them, bouncing back and forth for long extensions.
inline std::size_t reflect_index(long long i, std::size_t m) {
  const long long period = 2 * (static_cast<long long>(m) - 1);
  long long r = i % period;
  if (r < 0) r += period;
  if (r >= static_cast<long long>(m)) r = period - r;
  return static_cast<std::size_t>(r);
}

}  // namespace detail

// Extend to the next power of two by reflecting about the boundary samples,
// e.g. (1,2,3) -> (1,2,3,2).  Padding is split evenly, remainder on the right.
inline PaddedSignal reflect_pad(const Signal& data) {
  const std::size_t m = data.size();
  if (m < 2) throw std::invalid_argument("reflect_pad: need at least 2 samples");
  const std::size_t target = next_power_of_two(m);
  PaddedSignal out;
  out.original_length = m;
  if (target == m) {
    out.padded = data;
    out.offset = 0;
    return out;
  }
  const std::size_t left = (target - m) / 2;
  out.offset = left;
  out.padded.resize(target);
  for (std::size_t k = 0; k < target; ++k) {
    const long long src = static_cast<long long>(k) - static_cast<long long>(left);
    out.padded[k] = data[detail::reflect_index(src, m)];
  }
  return out;
}

}  // namespace wavecv
