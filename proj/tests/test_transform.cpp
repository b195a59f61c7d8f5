#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <wavecv/filters.hpp>
#include <wavecv/signal.hpp>
#include <wavecv/transform.hpp>

using namespace wavecv;

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix identity(std::size_t n) {
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

// Dense transform matrix built stage by stage, independent of the pyramid
// code path.  One stage maps the active prefix of length m to m/2 scaling
// rows followed by m/2 detail rows; composing the stages reproduces the
// flatten() layout [coarse | d_j0 | ... | d_{J-1}].
Matrix stage_matrix(std::size_t n, std::size_t m, const FilterBank& f) {
  Matrix s(n, std::vector<double>(n, 0.0));
  const std::size_t half = m / 2;
  for (std::size_t k = 0; k < half; ++k)
    for (std::size_t l = 0; l < f.lowpass.size(); ++l) {
      const std::size_t idx = (2 * k + l) % m;
      s[k][idx] += f.lowpass[l];
      s[half + k][idx] += f.highpass[l];
    }
  for (std::size_t i = m; i < n; ++i) s[i][i] = 1.0;
  return s;
}

Matrix dense_transform(std::size_t n, int j0, const FilterBank& f) {
  Matrix w = identity(n);
  for (std::size_t m = n; m > (std::size_t{1} << j0); m /= 2) {
    // place this stage's detail block after the ones already emitted: rows
    // m/2..m-1 of the stage land at positions m/2..m-1, which is exactly
    // where flatten() keeps level log2(m)-1
    w = matmul(stage_matrix(n, m, f), w);
  }
  return w;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
  return out;
}

Signal random_signal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Signal y(n);
  for (double& v : y) v = g(rng);
  return y;
}

double l2sq(const Signal& y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("filter banks", "[filters]") {
  SECTION("haar taps") {
    const FilterBank f = build_filter("haar");
    REQUIRE(f.lowpass.size() == 2);
    REQUIRE_THAT(f.lowpass[0], Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
    REQUIRE_THAT(f.lowpass[1], Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
  }
  SECTION("la8 normalization and double-shift orthogonality") {
    const FilterBank f = build_filter("la8");
    REQUIRE(f.lowpass.size() == 8);
    double sum = 0.0;
    for (double h : f.lowpass) sum += h;
    REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));
    for (int shift = 1; shift <= 3; ++shift) {
      double dot = 0.0;
      for (std::size_t k = 0; k + 2 * shift < 8; ++k)
        dot += f.lowpass[k] * f.lowpass[k + 2 * static_cast<std::size_t>(shift)];
      REQUIRE_THAT(dot, Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
    double norm = 0.0;
    for (double h : f.lowpass) norm += h * h;
    REQUIRE_THAT(norm, Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
  SECTION("unknown name rejected") {
    REQUIRE_THROWS_AS(build_filter("db4"), std::invalid_argument);
  }
}

TEST_CASE("dense matrix oracle", "[transform]") {
  std::mt19937_64 rng(71);
  for (const char* name : {"haar", "la8"}) {
    const FilterBank f = build_filter(name);
    for (std::size_t n : {std::size_t{8}, std::size_t{16}, std::size_t{64}}) {
      const int J = dyadic_log2(n);
      for (int j0 : {0, J - 2}) {
        const Matrix w = dense_transform(n, j0, f);

        // orthogonality: W W^T = I
        Matrix wt(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) wt[i][j] = w[j][i];
        const Matrix gram = matmul(w, wt);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            REQUIRE_THAT(gram[i][j], Catch::Matchers::WithinAbs(i == j ? 1.0 : 0.0, 1e-10));

        // pyramid output = W y entrywise
        for (int rep = 0; rep < 5; ++rep) {
          const Signal y = random_signal(n, rng);
          const std::vector<double> want = matvec(w, y);
          const std::vector<double> got = flatten(dwt(y, f, j0));
          REQUIRE(got.size() == want.size());
          for (std::size_t i = 0; i < n; ++i)
            REQUIRE_THAT(got[i], Catch::Matchers::WithinAbs(want[i], 1e-10));
        }
      }
    }
  }
}

TEST_CASE("haar special cases", "[transform]") {
  SECTION("constant signal has no detail") {
    const FilterBank f = build_filter("haar");
    Signal y(16, 3.25);
    const WaveletDecomposition d = dwt(y, f, 0);
    for (const auto& lvl : d.details)
      for (double c : lvl) REQUIRE(c == 0.0);
    REQUIRE(d.coarse.size() == 1);
    REQUIRE_THAT(d.coarse[0], Catch::Matchers::WithinAbs(3.25 * 4.0, 1e-12));
  }
  SECTION("alternating signal is pure finest detail") {
    const FilterBank f = build_filter("haar");
    Signal y(32);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i % 2 == 0) ? 1.0 : -1.0;
    const int J = dyadic_log2(y.size());
    const WaveletDecomposition d = dwt(y, f, J - 1);
    for (double c : d.coarse) REQUIRE_THAT(c, Catch::Matchers::WithinAbs(0.0, 1e-12));
    double detail_energy = 0.0;
    for (double c : d.finest()) detail_energy += c * c;
    REQUIRE_THAT(detail_energy, Catch::Matchers::WithinAbs(l2sq(y), 1e-10));
  }
}

TEST_CASE("round trip and energy", "[transform]") {
  std::mt19937_64 rng(172);
  SECTION("haar n=32") {
    const FilterBank f = build_filter("haar");
    const Signal y = random_signal(32, rng);
    const Signal back = idwt(dwt(y, f, 2));
    for (std::size_t i = 0; i < y.size(); ++i)
      REQUIRE_THAT(back[i], Catch::Matchers::WithinAbs(y[i], 1e-10));
  }
  SECTION("la8 n=512 at j0 = J-4") {
    const FilterBank f = build_filter("la8");
    const Signal y = random_signal(512, rng);
    const Signal back = idwt(dwt(y, f, dyadic_log2(512) - 4));
    double max_err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
      max_err = std::max(max_err, std::abs(back[i] - y[i]));
    REQUIRE(max_err < 1e-9);
  }
  SECTION("energy preserved, n=64") {
    for (const char* name : {"haar", "la8"}) {
      const FilterBank f = build_filter(name);
      const Signal y = random_signal(64, rng);
      const WaveletDecomposition d = dwt(y, f, 2);
      const double ey = l2sq(y);
      double ec = l2sq(d.coarse);
      for (const auto& lvl : d.details) ec += l2sq(lvl);
      REQUIRE_THAT(ec, Catch::Matchers::WithinAbs(ey, 1e-10 * ey));
    }
  }
  SECTION("zero decomposition inverts to zero") {
    const FilterBank f = build_filter("la8");
    WaveletDecomposition d = dwt(Signal(64, 0.0), f, 2);
    const Signal back = idwt(d);
    for (double v : back) REQUIRE(v == 0.0);
  }
}

TEST_CASE("transform input validation", "[transform]") {
  const FilterBank f = build_filter("haar");
  REQUIRE_THROWS_AS(dwt(Signal(48, 1.0), f, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(dwt(Signal(16, 1.0), f, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(dwt(Signal(16, 1.0), f, -1), std::invalid_argument);

  WaveletDecomposition d = dwt(Signal(16, 1.0), f, 1);
  d.details[0].resize(3);  // corrupt a level length
  REQUIRE_THROWS_AS(idwt(d), std::invalid_argument);
}

TEST_CASE("reflect padding", "[signal]") {
  SECTION("length 3 pads to (1,2,3,2)") {
    const PaddedSignal p = reflect_pad({1.0, 2.0, 3.0});
    REQUIRE(p.padded.size() == 4);
    REQUIRE(p.offset == 0);
    REQUIRE(p.original_length == 3);
    REQUIRE(p.padded == Signal{1.0, 2.0, 3.0, 2.0});
  }
  SECTION("length 314 pads to 512 with centered offset") {
    std::mt19937_64 rng(9);
    const Signal y = random_signal(314, rng);
    const PaddedSignal p = reflect_pad(y);
    REQUIRE(p.padded.size() == 512);
    REQUIRE(p.offset == 99);
    for (std::size_t i = 0; i < y.size(); ++i) REQUIRE(p.padded[p.offset + i] == y[i]);
  }
  SECTION("dyadic input unchanged") {
    std::mt19937_64 rng(10);
    const Signal y = random_signal(4096, rng);
    const PaddedSignal p = reflect_pad(y);
    REQUIRE(p.offset == 0);
    REQUIRE(p.padded == y);
  }
  SECTION("extraction reproduces the input for many lengths") {
    std::mt19937_64 rng(11);
    for (std::size_t len = 2; len <= 70; ++len) {
      const Signal y = random_signal(len, rng);
      const PaddedSignal p = reflect_pad(y);
      REQUIRE(is_power_of_two(p.padded.size()));
      REQUIRE(p.padded.size() >= len);
      for (std::size_t i = 0; i < len; ++i) REQUIRE(p.padded[p.offset + i] == y[i]);
    }
  }
  SECTION("mirrored values next to the data") {
    // data (a,b,c,d,e) -> left neighbor of a is b, right neighbor of e is d
    const PaddedSignal p = reflect_pad({1.0, 2.0, 3.0, 4.0, 5.0});
    REQUIRE(p.padded.size() == 8);
    REQUIRE(p.padded[p.offset - 1] == 2.0);
    REQUIRE(p.padded[p.offset + 5] == 4.0);
  }
  SECTION("too short") { REQUIRE_THROWS_AS(reflect_pad({1.0}), std::invalid_argument); }
}

TEST_CASE("default coarse level", "[transform]") {
  REQUIRE(default_j0(9) == 5);
  REQUIRE(default_j0(12) == 8);
  REQUIRE(default_j0(3) == 0);   // clamped at the bottom
  REQUIRE(default_j0(2) == 0);
  REQUIRE(default_j0(5, 0) == 4);  // clamped to J-1
  REQUIRE(default_j0(5, 2) == 3);
}
