#pragma once

// One-series denoising pipeline: read a column of numbers, reflect-pad to a
// dyadic length, run the chosen method, return the original region plus a
// diagnostics record.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavecv/cross_validation.hpp"
#include "wavecv/signal.hpp"
#include "wavecv/simulation.hpp"
#include "wavecv/thresholding.hpp"
#include "wavecv/transform.hpp"

namespace wavecv {

struct DenoiseOptions {
  Method method = Method::ld_block;
  std::string filter = "la8";
  ThresholdRule rule = ThresholdRule::hard;  // termwise methods only; nason honors it
  int j0_offset = 4;
  SearchConfig search;
};

struct LevelReport {
  int level = 0;
  double lambda = 0.0;
  std::optional<double> lambda_star;  // sqrt(lambda/L), block thresholds only
};

struct DenoiseDiagnostics {
  Method method = Method::ld_block;
  std::string filter;
  std::size_t n = 0;
  std::size_t padded_n = 0;
  std::size_t pad_offset = 0;
  int j0 = 0;
  double retained_fraction = 0.0;
  std::vector<LevelReport> levels;        // finest level first
  std::optional<std::string> rule;        // termwise methods
  std::optional<double> global_lambda;    // nason, visushrink
  std::optional<double> lambda_half;      // nason, before the size correction
  std::optional<std::size_t> block_size;  // ld_block
  std::optional<int> sweeps;              // ld_block refinement sweeps
};

struct DenoiseResult {
  Signal denoised;  // original length
  DenoiseDiagnostics diag;
};

namespace detail {

inline std::size_t count_nonzero_details(const WaveletDecomposition& d) {
  std::size_t kept = 0;
  for (const auto& lvl : d.details)
    for (double c : lvl)
      if (c != 0.0) ++kept;
  return kept;
}

inline void fill_levels(DenoiseDiagnostics& diag, const ThresholdProfile& p,
                        std::optional<std::size_t> block_size) {
  for (int j = p.j0 + p.level_count() - 1; j >= p.j0; --j) {
    LevelReport r;
    r.level = j;
    r.lambda = p.at(j);
    if (block_size)
      r.lambda_star = std::sqrt(r.lambda / static_cast<double>(*block_size));
    diag.levels.push_back(r);
  }
}

}  // namespace detail

inline DenoiseResult denoise_series(const Signal& y, const DenoiseOptions& opt) {
  if (y.size() < 16)
    throw std::invalid_argument("denoise_series: need at least 16 observations");
  const FilterBank filter = build_filter(opt.filter);
  const PaddedSignal ps = reflect_pad(y);
  const int J = dyadic_log2(ps.padded.size());
  const int j0 = default_j0(J, opt.j0_offset);

  DenoiseResult out;
  out.diag.method = opt.method;
  out.diag.filter = opt.filter;
  out.diag.n = y.size();
  out.diag.padded_n = ps.padded.size();
  out.diag.pad_offset = ps.offset;
  out.diag.j0 = j0;

  Signal full;
  switch (opt.method) {
    case Method::ld_block: {
      const LdBlockResult r = ld_block_cv(ps.padded, filter, j0, opt.search);
      full = r.denoised;
      out.diag.retained_fraction = r.diag.retained_fraction;
      out.diag.block_size = r.diag.block_size;
      out.diag.sweeps = r.diag.trace.sweeps;
      detail::fill_levels(out.diag, r.diag.corrected, r.diag.block_size);
      break;
    }
    case Method::nason: {
      const NasonResult r = nason_cv(ps.padded, filter, j0, opt.rule, opt.search);
      full = r.denoised;
      out.diag.retained_fraction = r.retained_fraction;
      out.diag.rule = opt.rule == ThresholdRule::hard ? "hard" : "soft";
      out.diag.global_lambda = r.lambda;
      out.diag.lambda_half = r.lambda_half;
      break;
    }
    default: {
      const WaveletDecomposition d = dwt(ps.padded, filter, j0);
      ThresholdProfile p;
      ThresholdRule rule = ThresholdRule::soft;
      switch (opt.method) {
        case Method::visushrink_hard:
          p = visushrink_profile(d);
          rule = ThresholdRule::hard;
          out.diag.global_lambda = p.at(j0);
          break;
        case Method::visushrink_soft:
          p = visushrink_profile(d);
          out.diag.global_lambda = p.at(j0);
          break;
        case Method::sureshrink:
          p = sureshrink_profile(d);
          detail::fill_levels(out.diag, p, std::nullopt);
          break;
        case Method::hybridshrink:
          p = hybridshrink_profile(d);
          detail::fill_levels(out.diag, p, std::nullopt);
          break;
        default: throw std::logic_error("unreachable method");
      }
      out.diag.rule = rule == ThresholdRule::hard ? "hard" : "soft";
      const WaveletDecomposition td = apply_profile(d, p, rule);
      out.diag.retained_fraction =
          static_cast<double>(td.coarse.size() + detail::count_nonzero_details(td)) /
          static_cast<double>(td.n());
      full = idwt(td);
      break;
    }
  }

  out.denoised.assign(full.begin() + static_cast<std::ptrdiff_t>(ps.offset),
                      full.begin() + static_cast<std::ptrdiff_t>(ps.offset + y.size()));
  return out;
}

// One number per line; blank lines skipped; anything else is a parse error
// naming the offending line.
inline Signal read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  Signal out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string tok = detail::trim(line);
    if (tok.empty()) continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size())
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": not a number: " + tok);
    out.push_back(v);
  }
  return out;
}

inline DenoiseResult denoise_file(const std::string& path, const DenoiseOptions& opt) {
  return denoise_series(read_series(path), opt);
}

inline nlohmann::json diagnostics_json(const DenoiseDiagnostics& d) {
  nlohmann::json j;
  j["method"] = to_string(d.method);
  j["filter"] = d.filter;
  j["n"] = d.n;
  j["padded_n"] = d.padded_n;
  j["pad_offset"] = d.pad_offset;
  j["j0"] = d.j0;
  j["retained_fraction"] = d.retained_fraction;
  if (d.rule) j["rule"] = *d.rule;
  if (d.global_lambda) j["global_lambda"] = *d.global_lambda;
  if (d.lambda_half) j["lambda_half"] = *d.lambda_half;
  if (d.block_size) j["block_size"] = *d.block_size;
  if (d.sweeps) j["sweeps"] = *d.sweeps;
  if (!d.levels.empty()) {
    nlohmann::json levels = nlohmann::json::array();
    for (const LevelReport& r : d.levels) {
      nlohmann::json lvl;
      lvl["level"] = r.level;
      lvl["lambda"] = r.lambda;
      if (r.lambda_star) lvl["lambda_star"] = *r.lambda_star;
      levels.push_back(lvl);
    }
    j["levels"] = levels;
  }
  return j;
}

inline void write_series_csv(const std::string& path, const Signal& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  char buf[64];
  for (double v : s) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace wavecv
