#pragma once

// Threshold selection by even/odd-half cross-validation: a global term-by-term
// selector and the level-dependent block selector, both with sample-size
// corrections mapping half-data thresholds to the full series.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wavecv/thresholding.hpp"
#include "wavecv/transform.hpp"

namespace wavecv {

enum class CvMode { term_by_term, block };

// Which statistic the optimizer minimizes.  three_term is the full objective;
// data_fit_only drops the reconstruction-gap term (the original global
// cross-validation statistic).
enum class CvStatistic { three_term, data_fit_only };

struct SearchConfig {
  int grid_points = 64;
  int refine_rounds = 2;
  int max_outer_iters = 5;
  double convergence_tol = 1e-6;
};

namespace detail {

inline void validate_search_config(const SearchConfig& cfg) {
  if (cfg.grid_points < 8) throw std::invalid_argument("grid_points must be >= 8");
  if (cfg.refine_rounds < 0) throw std::invalid_argument("refine_rounds must be >= 0");
  if (cfg.max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
  if (!(cfg.convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be > 0");
}

}  // namespace detail

// 1-indexed even/odd split: returns ((y2,y4,...,yn), (y1,y3,...,y_{n-1})).
inline std::pair<Signal, Signal> split_even_odd(const Signal& y) {
  if (y.size() < 4 || !is_power_of_two(y.size()))
    throw std::invalid_argument("split_even_odd: length must be dyadic and >= 4");
  const std::size_t half = y.size() / 2;
  Signal even(half), odd(half);
  for (std::size_t k = 0; k < half; ++k) {
    odd[k] = y[2 * k];
    even[k] = y[2 * k + 1];
  }
  return {std::move(even), std::move(odd)};
}

// Adjacent-pair average with periodic wrap: out_j = (r_j + r_{j+1 mod m})/2.
// Places a reconstruction from one half onto the other half's sample grid.
inline Signal interpolate_half(const Signal& r) {
  if (r.size() < 2) throw std::invalid_argument("interpolate_half: need at least 2 samples");
  const std::size_t m = r.size();
  Signal out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = 0.5 * (r[j] + r[(j + 1) % m]);
  return out;
}

struct CvContext {
  Signal y_even, y_odd;
  WaveletDecomposition d_even, d_odd;
  BlockPartition partition;  // for the half length; block mode only
  CvMode mode = CvMode::block;
  ThresholdRule rule = ThresholdRule::hard;  // term-by-term mode only
  CvStatistic statistic = CvStatistic::three_term;
  int j0 = 0;  // half decompositions carry detail levels j0..J-1
  int J = 0;

  std::vector<int> all_levels() const {
    std::vector<int> out;
    for (int j = j0; j < J; ++j) out.push_back(j);
    return out;
  }
};

// The half decompositions sit one level lower than the full data, so level
// thresholds are aligned by position relative to the finest level: the
// halves use j0-1 as their coarsest thresholded level.
inline CvContext make_cv_context(const Signal& y, const FilterBank& filter, int j0,
                                 CvMode mode, ThresholdRule rule = ThresholdRule::hard,
                                 CvStatistic statistic = CvStatistic::three_term) {
  const int J = dyadic_log2(y.size());
  if (J < 2) throw std::invalid_argument("make_cv_context: length must be >= 4");
  if (j0 < 0 || j0 > J - 1) throw std::invalid_argument("make_cv_context: j0 out of range");
  CvContext ctx;
  ctx.mode = mode;
  ctx.rule = rule;
  ctx.statistic = statistic;
  ctx.j0 = j0 > 0 ? j0 - 1 : 0;
  ctx.J = J - 1;
  auto halves = split_even_odd(y);
  ctx.d_even = dwt(halves.first, filter, ctx.j0);
  ctx.d_odd = dwt(halves.second, filter, ctx.j0);
  ctx.partition = make_block_partition(y.size() / 2, ctx.j0);
  ctx.y_even = std::move(halves.first);
  ctx.y_odd = std::move(halves.second);
  return ctx;
}

struct CvObjectiveParts {
  double data_fit = 0.0;   // ||interp(f_o) - y_e||^2 + ||interp(f_e) - y_o||^2
  double recon_gap = 0.0;  // ||interp(f_o) - f_e||^2
};

namespace detail {

// Evaluates the cross-validation statistic for candidate profiles, reusing
// working buffers across evaluations.
struct CvEvaluator {
  const CvContext& ctx;
  WaveletDecomposition we, wo;

  explicit CvEvaluator(const CvContext& c) : ctx(c), we(c.d_even), wo(c.d_odd) {}

  void check_profile(const ThresholdProfile& p) const {
    if (p.j0 != ctx.j0 || p.level_count() != ctx.J - ctx.j0)
      throw std::invalid_argument("profile does not cover the context's detail levels");
    const ThresholdScale want = ctx.mode == CvMode::block ? ThresholdScale::sum_of_squares
                                                          : ThresholdScale::amplitude;
    if (p.scale != want)
      throw std::invalid_argument("profile scale does not match the context mode");
  }

  void threshold_into(WaveletDecomposition& w, const WaveletDecomposition& src,
                      const ThresholdProfile& p) const {
    for (int j = ctx.j0; j < ctx.J; ++j) {
      auto& lvl = w.detail(j);
      lvl = src.detail(j);
      if (ctx.mode == CvMode::block)
        block_project(lvl, ctx.partition.at(j), p.at(j), ctx.partition.block_size);
      else
        apply_rule(lvl, p.at(j), ctx.rule);
    }
  }

  // The halves live on interleaved grids: interp(f_o)[k] sits on even sample
  // k, interp(f_e)[k] sits on odd sample k+1 (mod m).
  CvObjectiveParts parts(const ThresholdProfile& p) {
    check_profile(p);
    threshold_into(we, ctx.d_even, p);
    threshold_into(wo, ctx.d_odd, p);
    const Signal fe = idwt(we), fo = idwt(wo);
    const std::size_t m = fe.size();
    double a = 0.0, b = 0.0, c = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t k1 = (k + 1 == m) ? 0 : k + 1;
      const double io = 0.5 * (fo[k] + fo[k1]);
      const double ie = 0.5 * (fe[k] + fe[k1]);
      const double da = io - ctx.y_even[k];
      const double db = ie - ctx.y_odd[k1];
      const double dc = io - fe[k];
      a += da * da;
      b += db * db;
      c += dc * dc;
    }
    return {a + b, c};
  }

  double score(const ThresholdProfile& p) {
    const CvObjectiveParts q = parts(p);
    if (ctx.statistic == CvStatistic::data_fit_only) return q.data_fit;
    return 0.5 * q.data_fit + 0.5 * q.recon_gap;
  }
};

}  // namespace detail

inline CvObjectiveParts cv_objective_parts(const CvContext& ctx, const ThresholdProfile& p) {
  detail::CvEvaluator ev(ctx);
  return ev.parts(p);
}

// The three-term statistic M(profile), independent of ctx.statistic.
inline double cv_objective(const CvContext& ctx, const ThresholdProfile& p) {
  const CvObjectiveParts q = cv_objective_parts(ctx, p);
  return 0.5 * q.data_fit + 0.5 * q.recon_gap;
}

struct SearchResult {
  double lambda = 0.0;
  double objective = 0.0;
};

namespace detail {

// Derivative-free minimization over [0, range_hi]: equispaced grid, then
// re-gridded refinement around the incumbent.  The objective is piecewise
// constant under hard/block rules, so exact ties resolve to the smallest
// lambda.
template <typename F>
SearchResult grid_search(F&& fn, double range_hi, const SearchConfig& cfg) {
  validate_search_config(cfg);
  if (!(range_hi >= 0.0) || !std::isfinite(range_hi))
    throw std::invalid_argument("grid_search: range_hi must be finite and >= 0");
  SearchResult best{std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  double lo = 0.0, hi = range_hi;
  for (int round = 0; round <= cfg.refine_rounds; ++round) {
    const int gp = cfg.grid_points;
    const double step = (hi - lo) / static_cast<double>(gp - 1);
    for (int i = 0; i < gp; ++i) {
      const double lam = (i == gp - 1) ? hi : lo + step * static_cast<double>(i);
      const double v = fn(lam);
      if (v < best.objective || (v == best.objective && lam < best.lambda))
        best = {lam, v};
      if (step == 0.0) break;
    }
    lo = std::max(0.0, best.lambda - step);
    hi = std::min(range_hi, best.lambda + step);
  }
  return best;
}

}  // namespace detail

// Upper end of the threshold search range: the largest block kill point
// (block energy, prorated for short blocks) or the largest coefficient
// magnitude, over both halves of every searched level.
inline double cv_search_ceiling(const CvContext& ctx, const std::vector<int>& levels) {
  double hi = 0.0;
  for (int j : levels) {
    for (const WaveletDecomposition* d : {&ctx.d_even, &ctx.d_odd}) {
      const auto& lvl = d->detail(j);
      if (ctx.mode == CvMode::block) {
        for (const IndexRange& blk : ctx.partition.at(j)) {
          double e = 0.0;
          for (std::size_t k = blk.begin; k < blk.end; ++k) e += lvl[k] * lvl[k];
          const double kill = e * static_cast<double>(ctx.partition.block_size) /
                              static_cast<double>(blk.length());
          hi = std::max(hi, kill);
        }
      } else {
        for (double c : lvl) hi = std::max(hi, std::abs(c));
      }
    }
  }
  return hi;
}

namespace detail {

inline void validate_levels(const CvContext& ctx, const std::vector<int>& levels) {
  if (levels.empty()) throw std::invalid_argument("search_threshold: empty level set");
  for (int j : levels)
    if (j < ctx.j0 || j >= ctx.J)
      throw std::invalid_argument("search_threshold: level out of range");
}

inline ThresholdProfile zero_profile(const CvContext& ctx) {
  ThresholdProfile p;
  p.j0 = ctx.j0;
  p.lambda.assign(static_cast<std::size_t>(ctx.J - ctx.j0), 0.0);
  p.scale = ctx.mode == CvMode::block ? ThresholdScale::sum_of_squares
                                      : ThresholdScale::amplitude;
  return p;
}

}  // namespace detail

// Minimizes the context's statistic over a single lambda applied to every
// level in `levels`, holding the remaining levels at `fixed`.
inline SearchResult search_threshold(const CvContext& ctx, const std::vector<int>& levels,
                                     const ThresholdProfile& fixed, double range_hi,
                                     const SearchConfig& cfg = {}) {
  detail::validate_levels(ctx, levels);
  detail::CvEvaluator ev(ctx);
  ev.check_profile(fixed);
  ThresholdProfile p = fixed;
  auto fn = [&](double lam) {
    for (int j : levels) p.at(j) = lam;
    return ev.score(p);
  };
  return detail::grid_search(fn, range_hi, cfg);
}

// First pass of the level-dependent selection: a single global search fixes
// the finest level's lambda, then levels J-2..j0 are searched jointly and
// peeled off one per step.
inline ThresholdProfile initial_cascade(const CvContext& ctx, const SearchConfig& cfg = {}) {
  ThresholdProfile p = detail::zero_profile(ctx);
  const std::vector<int> all = ctx.all_levels();
  const double range_hi = cv_search_ceiling(ctx, all);
  p.at(ctx.J - 1) = search_threshold(ctx, all, p, range_hi, cfg).lambda;
  std::vector<int> searched = all;
  for (int top = ctx.J - 2; top >= ctx.j0; --top) {
    searched.pop_back();  // drop the level fixed in the previous step
    p.at(top) = search_threshold(ctx, searched, p, range_hi, cfg).lambda;
  }
  return p;
}

struct RefineTrace {
  std::vector<double> objective;  // statistic before the first update, then after each update
  int sweeps = 0;
};

// Re-optimizes one level at a time, finest to coarsest, until the largest
// relative change in a sweep drops below tolerance.  Each update keeps the
// incumbent unless the search strictly improves on it (or ties at a smaller
// lambda), so the objective never increases.
inline ThresholdProfile coordinate_refine(const CvContext& ctx, const ThresholdProfile& profile,
                                          const SearchConfig& cfg = {},
                                          RefineTrace* trace = nullptr) {
  detail::validate_search_config(cfg);
  detail::CvEvaluator ev(ctx);
  ev.check_profile(profile);
  ThresholdProfile p = profile;
  const double range_hi = cv_search_ceiling(ctx, ctx.all_levels());
  double current = ev.score(p);
  if (trace) {
    trace->objective.clear();
    trace->objective.push_back(current);
    trace->sweeps = 0;
  }
  for (int sweep = 0; sweep < cfg.max_outer_iters; ++sweep) {
    double max_rel = 0.0;
    for (int j = ctx.J - 1; j >= ctx.j0; --j) {
      const double old_lambda = p.at(j);
      const SearchResult r = search_threshold(ctx, {j}, p, range_hi, cfg);
      if (r.objective < current ||
          (r.objective == current && r.lambda < old_lambda)) {
        p.at(j) = r.lambda;
        current = r.objective;
      }
      if (trace) trace->objective.push_back(current);
      const double denom = std::max(std::abs(old_lambda), std::abs(p.at(j)));
      if (denom > 0.0) max_rel = std::max(max_rel, std::abs(p.at(j) - old_lambda) / denom);
    }
    if (trace) ++trace->sweeps;
    if (max_rel < cfg.convergence_tol) break;
  }
  return p;
}

// Sample-size correction for a single threshold selected on n/2 points:
// lambda_n = (1 - log2/log n)^{-1/2} lambda_{n/2}.
inline double nason_correction(double lambda, std::size_t n) {
  if (n <= 2) throw std::invalid_argument("nason_correction: n must be > 2");
  if (lambda < 0.0) throw std::invalid_argument("nason_correction: lambda must be >= 0");
  const double ratio = std::log(2.0) / std::log(static_cast<double>(n));
  return lambda / std::sqrt(1.0 - ratio);
}

// Level-dependent correction on the sum-of-squares scale (no square root):
// with j = 1 the finest level, each lambda_j is multiplied by
// (1 - log2/log(n/2^j))^{-1}.  The profile must be indexed by full-data
// levels; n is the full length.
inline ThresholdProfile ld_correction(const ThresholdProfile& profile, std::size_t n) {
  if (profile.scale != ThresholdScale::sum_of_squares)
    throw std::invalid_argument("ld_correction: profile must be on the sum-of-squares scale");
  const int J = dyadic_log2(n);
  ThresholdProfile out = profile;
  for (int i = 0; i < profile.level_count(); ++i) {
    const int level = profile.j0 + i;
    const int j = J - level;  // 1 = finest
    if (j < 1 || (n >> j) <= 2)
      throw std::invalid_argument("ld_correction: n/2^j must exceed 2 for every level");
    const double points = static_cast<double>(n >> j);
    const double factor = 1.0 / (1.0 - std::log(2.0) / std::log(points));
    out.lambda[static_cast<std::size_t>(i)] *= factor;
  }
  return out;
}

namespace detail {

inline void require_cv_input(const Signal& y) {
  if (y.size() < 16 || !is_power_of_two(y.size()))
    throw std::invalid_argument("cross-validated denoising needs dyadic length >= 16");
}

}  // namespace detail

struct NasonResult {
  Signal denoised;
  double lambda_half = 0.0;       // selected on the half data
  double lambda = 0.0;            // after nason_correction; applied to the full data
  double retained_fraction = 0.0; // kept coefficients (scaling block included) / n
};

// Global term-by-term cross-validation: one lambda for all detail levels,
// minimizing the data-fit bracket only, then corrected and applied.
inline NasonResult nason_cv(const Signal& y, const FilterBank& filter, int j0,
                            ThresholdRule rule = ThresholdRule::hard,
                            const SearchConfig& cfg = {}) {
  detail::require_cv_input(y);
  const CvContext ctx =
      make_cv_context(y, filter, j0, CvMode::term_by_term, rule, CvStatistic::data_fit_only);
  const std::vector<int> all = ctx.all_levels();
  const double range_hi = cv_search_ceiling(ctx, all);
  NasonResult out;
  out.lambda_half = search_threshold(ctx, all, detail::zero_profile(ctx), range_hi, cfg).lambda;
  out.lambda = nason_correction(out.lambda_half, y.size());

  WaveletDecomposition d = dwt(y, filter, j0);
  std::size_t kept = 0;
  for (auto& lvl : d.details) {
    for (double c : lvl)
      if (std::abs(c) > out.lambda) ++kept;
    apply_rule(lvl, out.lambda, rule);
  }
  out.retained_fraction =
      static_cast<double>(d.coarse.size() + kept) / static_cast<double>(y.size());
  out.denoised = idwt(d);
  return out;
}

struct LdBlockDiagnostics {
  ThresholdProfile initial;      // half-data levels, cascade output
  ThresholdProfile refined;      // half-data levels, after coordinate refinement
  ThresholdProfile uncorrected;  // full-data levels, before ld_correction
  ThresholdProfile corrected;    // full-data levels, as applied
  RefineTrace trace;
  std::size_t block_size = 0;    // L for the full-length partition
  double retained_fraction = 0.0;
};

struct LdBlockResult {
  Signal denoised;
  ThresholdProfile profile;  // the corrected, applied profile
  LdBlockDiagnostics diag;
};

// The level-dependent block estimator: cascade + coordinate refinement on the
// halves, sample-size correction, then blockwise keep-or-kill on the full
// decomposition with the partition recomputed for length n.
inline LdBlockResult ld_block_cv(const Signal& y, const FilterBank& filter, int j0,
                                 const SearchConfig& cfg = {}) {
  detail::require_cv_input(y);
  const CvContext ctx = make_cv_context(y, filter, j0, CvMode::block, ThresholdRule::hard,
                                        CvStatistic::three_term);
  LdBlockResult out;
  out.diag.initial = initial_cascade(ctx, cfg);
  out.diag.refined = coordinate_refine(ctx, out.diag.initial, cfg, &out.diag.trace);

  // Half-data level j corresponds to full-data level j+1 (same offset from
  // the finest level).
  out.diag.uncorrected = out.diag.refined;
  out.diag.uncorrected.j0 = ctx.j0 + 1;
  out.diag.corrected = ld_correction(out.diag.uncorrected, y.size());

  WaveletDecomposition d = dwt(y, filter, j0);
  const BlockPartition partition = make_block_partition(y.size(), out.diag.corrected.j0);
  out.diag.block_size = partition.block_size;
  std::size_t kept = 0;
  for (int j = out.diag.corrected.j0; j < d.J(); ++j)
    kept += block_project(d.detail(j), partition.at(j), out.diag.corrected.at(j),
                          partition.block_size);
  const std::size_t untouched = std::size_t{1} << out.diag.corrected.j0;
  out.diag.retained_fraction =
      static_cast<double>(untouched + kept) / static_cast<double>(y.size());
  out.denoised = idwt(d);
  out.profile = out.diag.corrected;
  return out;
}

}  // namespace wavecv
