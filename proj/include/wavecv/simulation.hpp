#pragma once

// Monte-Carlo comparison harness: runs each configured denoiser on shared
// noisy replicates (paired design), aggregates MSE statistics, and emits
// CSV or markdown tables.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "wavecv/cross_validation.hpp"
#include "wavecv/test_signals.hpp"
#include "wavecv/thresholding.hpp"
#include "wavecv/transform.hpp"

namespace wavecv {

enum class Method {
  ld_block,
  nason,
  visushrink_hard,
  visushrink_soft,
  sureshrink,
  hybridshrink,
};

inline const char* to_string(Method m) {
  switch (m) {
    case Method::ld_block: return "ld_block";
    case Method::nason: return "nason";
    case Method::visushrink_hard: return "visushrink_hard";
    case Method::visushrink_soft: return "visushrink_soft";
    case Method::sureshrink: return "sureshrink";
    case Method::hybridshrink: return "hybridshrink";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "ld_block") return Method::ld_block;
  if (s == "nason") return Method::nason;
  if (s == "visushrink_hard") return Method::visushrink_hard;
  if (s == "visushrink_soft") return Method::visushrink_soft;
  if (s == "sureshrink") return Method::sureshrink;
  if (s == "hybridshrink") return Method::hybridshrink;
  throw std::invalid_argument("unknown method: " + s);
}

struct SimulationConfig {
  std::vector<TestFunctionId> functions;
  std::vector<std::size_t> sizes;
  std::vector<double> snrs;
  std::vector<NoiseFamily> noises;
  std::vector<Method> methods;
  int reps = 100;
  std::string filter = "la8";
  int j0_offset = 4;
  std::uint64_t seed = 1;
  SearchConfig search;
};

// ---------------------------------------------------------------------------
// Flat key = value config format.  '#' starts a comment; list values are
// whitespace-separated.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& value, Parse parse) {
  std::vector<T> out;
  for (const std::string& tok : split_ws(value)) out.push_back(parse(tok));
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

inline long long parse_int(const std::string& s) {
  std::size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
  return v;
}

}  // namespace detail

inline SimulationConfig parse_simulation_config(const std::string& text) {
  SimulationConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "functions")
        cfg.functions = detail::parse_list<TestFunctionId>(
            value, [](const std::string& s) { return parse_test_function(s); });
      else if (key == "sizes")
        cfg.sizes = detail::parse_list<std::size_t>(value, [](const std::string& s) {
          const long long v = detail::parse_int(s);
          if (v < 2) throw std::invalid_argument("size must be >= 2");
          return static_cast<std::size_t>(v);
        });
      else if (key == "snrs")
        cfg.snrs = detail::parse_list<double>(
            value, [](const std::string& s) { return detail::parse_double(s); });
      else if (key == "noises")
        cfg.noises = detail::parse_list<NoiseFamily>(
            value, [](const std::string& s) { return parse_noise_family(s); });
      else if (key == "methods")
        cfg.methods = detail::parse_list<Method>(
            value, [](const std::string& s) { return parse_method(s); });
      else if (key == "reps")
        cfg.reps = static_cast<int>(detail::parse_int(value));
      else if (key == "filter")
        cfg.filter = value;
      else if (key == "j0_offset")
        cfg.j0_offset = static_cast<int>(detail::parse_int(value));
      else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(detail::parse_int(value));
      else if (key == "grid_points")
        cfg.search.grid_points = static_cast<int>(detail::parse_int(value));
      else if (key == "refine_rounds")
        cfg.search.refine_rounds = static_cast<int>(detail::parse_int(value));
      else if (key == "max_outer_iters")
        cfg.search.max_outer_iters = static_cast<int>(detail::parse_int(value));
      else if (key == "convergence_tol")
        cfg.search.convergence_tol = detail::parse_double(value);
      else
        throw std::invalid_argument("unknown key: " + key);
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

inline SimulationConfig load_simulation_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_simulation_config(buf.str());
}

// ---------------------------------------------------------------------------
// Results

struct CellKey {
  TestFunctionId function = TestFunctionId::blip;
  std::size_t n = 0;
  double snr = 0.0;
  NoiseFamily noise = NoiseFamily::normal;
};

struct ResultRow {
  CellKey cell;
  Method method = Method::visushrink_hard;
  double mean_mse = 0.0;
  double sd_mse = 0.0;
  double ratio = 0.0;    // mean_mse / cell's visushrink_hard mean_mse
  double p_value = 1.0;  // paired t vs the cell's minimum-mean method
  bool leader = false;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<std::string> errors;  // per-cell configuration problems
};

// ---------------------------------------------------------------------------
// Deterministic per-(cell, repetition) seeding.  Substreams depend only on
// the cell's content and the repetition index, never on scheduling.

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

inline std::uint64_t cell_hash(const CellKey& cell) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s|%zu|%.17g|%s", to_string(cell.function), cell.n, cell.snr,
                to_string(cell.noise));
  return detail::fnv1a(buf);
}

inline std::uint64_t derive_rep_seed(std::uint64_t master_seed, std::uint64_t cell,
                                     int rep) {
  return detail::mix64(detail::mix64(master_seed ^ cell) +
                       static_cast<std::uint64_t>(rep) + 1);
}

// ---------------------------------------------------------------------------
// Method dispatch

inline Signal apply_method(const Signal& y, Method method, const FilterBank& filter, int j0,
                           const SearchConfig& search) {
  switch (method) {
    case Method::ld_block: return ld_block_cv(y, filter, j0, search).denoised;
    case Method::nason: return nason_cv(y, filter, j0, ThresholdRule::hard, search).denoised;
    case Method::visushrink_hard:
      return idwt(visushrink(dwt(y, filter, j0), ThresholdRule::hard));
    case Method::visushrink_soft:
      return idwt(visushrink(dwt(y, filter, j0), ThresholdRule::soft));
    case Method::sureshrink: return idwt(sureshrink(dwt(y, filter, j0)));
    case Method::hybridshrink: return idwt(hybridshrink(dwt(y, filter, j0)));
  }
  throw std::logic_error("unreachable method");
}

// Two-sided paired t-test p-value from per-repetition differences.
inline double paired_t_pvalue(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  if (n < 2) throw std::invalid_argument("paired_t_pvalue: need at least 2 pairs");
  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t_distribution<double> dist(static_cast<double>(n - 1));
  return 2.0 * boost::math::cdf(dist, -std::abs(t));
}

// ---------------------------------------------------------------------------
// The runner.  Within a (cell, repetition) every method sees the identical
// noisy vector; worker count never changes the output.

inline ResultTable run_simulation(const SimulationConfig& cfg, int threads = 1) {
  if (cfg.reps < 2) throw std::invalid_argument("run_simulation: reps must be >= 2");
  if (cfg.functions.empty() || cfg.sizes.empty() || cfg.snrs.empty() || cfg.noises.empty())
    throw std::invalid_argument("run_simulation: empty cell grid");
  for (std::size_t n : cfg.sizes)
    if (!is_power_of_two(n) || n < 16)
      throw std::invalid_argument("run_simulation: sizes must be dyadic and >= 16");

  std::vector<Method> methods = cfg.methods;
  if (methods.empty()) methods.push_back(Method::visushrink_hard);
  if (std::find(methods.begin(), methods.end(), Method::visushrink_hard) == methods.end())
    methods.push_back(Method::visushrink_hard);  // the ratio baseline is always run

  const FilterBank filter = build_filter(cfg.filter);

  struct Cell {
    CellKey key;
    Signal truth;
    int j0 = 0;
    std::uint64_t hash = 0;
    std::vector<std::vector<double>> mse;  // [method][rep]
  };

  ResultTable table;
  std::vector<Cell> cells;
  for (TestFunctionId f : cfg.functions)
    for (std::size_t n : cfg.sizes)
      for (double snr : cfg.snrs)
        for (NoiseFamily noise : cfg.noises) {
          CellKey key{f, n, snr, noise};
          if (!has_finite_variance(noise)) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "cell %s n=%zu snr=%g noise=%s: snr undefined for this family",
                          to_string(f), n, snr, to_string(noise));
            table.errors.emplace_back(buf);
            continue;
          }
          Cell c;
          c.key = key;
          c.truth = test_function(f, n);
          c.j0 = default_j0(dyadic_log2(n), cfg.j0_offset);
          c.hash = cell_hash(key);
          c.mse.assign(methods.size(), std::vector<double>(static_cast<std::size_t>(cfg.reps)));
          cells.push_back(std::move(c));
        }

  // One task per (cell, repetition); workers pull from a shared counter and
  // write into preallocated slots, so aggregation order is fixed.
  struct Task {
    std::size_t cell;
    int rep;
  };
  std::vector<Task> tasks;
  tasks.reserve(cells.size() * static_cast<std::size_t>(cfg.reps));
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (int r = 0; r < cfg.reps; ++r) tasks.push_back({c, r});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      Cell& cell = cells[tasks[i].cell];
      const int rep = tasks[i].rep;
      std::mt19937_64 rng(derive_rep_seed(cfg.seed, cell.hash, rep));
      const std::vector<double> noise = sample_noise(cell.key.noise, cell.key.n, rng);
      const Signal y = scale_to_snr(cell.truth, noise, cell.key.snr);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const Signal est = apply_method(y, methods[m], filter, cell.j0, cfg.search);
        cell.mse[m][static_cast<std::size_t>(rep)] = mse(est, cell.truth);
      }
    }
  };

  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const std::size_t baseline = static_cast<std::size_t>(
      std::find(methods.begin(), methods.end(), Method::visushrink_hard) - methods.begin());
  for (Cell& cell : cells) {
    std::vector<double> means(methods.size()), sds(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
      double mean = 0.0;
      for (double v : cell.mse[m]) mean += v;
      mean /= static_cast<double>(cfg.reps);
      double ss = 0.0;
      for (double v : cell.mse[m]) ss += (v - mean) * (v - mean);
      means[m] = mean;
      sds[m] = std::sqrt(ss / static_cast<double>(cfg.reps - 1));
    }
    std::size_t lead = 0;
    for (std::size_t m = 1; m < methods.size(); ++m)
      if (means[m] < means[lead]) lead = m;
    std::vector<double> diffs(static_cast<std::size_t>(cfg.reps));
    for (std::size_t m = 0; m < methods.size(); ++m) {
      ResultRow row;
      row.cell = cell.key;
      row.method = methods[m];
      row.mean_mse = means[m];
      row.sd_mse = sds[m];
      row.ratio = means[m] / means[baseline];
      row.leader = m == lead;
      if (m == lead) {
        row.p_value = 1.0;
      } else {
        for (int r = 0; r < cfg.reps; ++r)
          diffs[static_cast<std::size_t>(r)] =
              cell.mse[m][static_cast<std::size_t>(r)] - cell.mse[lead][static_cast<std::size_t>(r)];
        row.p_value = paired_t_pvalue(diffs);
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Emission

enum class TableFormat { csv, markdown };

namespace detail {

inline std::string fmt_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace detail

// best_group = 1 when the row is the cell leader or not significantly worse
// than it (p_value > alpha).
inline std::string emit_table(const ResultTable& t, TableFormat format, double alpha = 0.05) {
  if (t.rows.empty()) throw std::invalid_argument("emit_table: empty table");
  std::ostringstream out;
  if (format == TableFormat::csv) {
    out << "function,n,snr,noise,method,mean_mse,sd_mse,ratio,p_value,best_group\n";
    for (const ResultRow& r : t.rows) {
      const bool best = r.leader || r.p_value > alpha;
      out << to_string(r.cell.function) << ',' << r.cell.n << ','
          << detail::fmt_g6(r.cell.snr) << ',' << to_string(r.cell.noise) << ','
          << to_string(r.method) << ',' << detail::fmt_g6(r.mean_mse) << ','
          << detail::fmt_g6(r.sd_mse) << ',' << detail::fmt_g6(r.ratio) << ','
          << detail::fmt_g6(r.p_value) << ',' << (best ? 1 : 0) << '\n';
    }
    return out.str();
  }

  // Markdown: one table per (noise, snr), functions x sizes as rows, one
  // column per method holding "ratio (sd)"; leader bold, other best-group
  // members starred.
  struct Group {
    NoiseFamily noise;
    double snr;
    std::vector<std::size_t> rows;
  };
  std::vector<Group> groups;
  std::vector<Method> methods;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const ResultRow& r = t.rows[i];
    auto g = std::find_if(groups.begin(), groups.end(), [&](const Group& gr) {
      return gr.noise == r.cell.noise && gr.snr == r.cell.snr;
    });
    if (g == groups.end()) {
      groups.push_back({r.cell.noise, r.cell.snr, {}});
      g = groups.end() - 1;
    }
    g->rows.push_back(i);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
  }
  for (const Group& g : groups) {
    out << "### noise=" << to_string(g.noise) << ", snr=" << detail::fmt_g6(g.snr) << "\n\n";
    out << "| function | n |";
    for (Method m : methods) out << ' ' << to_string(m) << " |";
    out << "\n|---|---|";
    for (std::size_t m = 0; m < methods.size(); ++m) out << "---|";
    out << '\n';
    // walk distinct (function, n) in first-appearance order
    std::vector<std::pair<TestFunctionId, std::size_t>> keys;
    for (std::size_t i : g.rows) {
      const auto key = std::make_pair(t.rows[i].cell.function, t.rows[i].cell.n);
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const auto& key : keys) {
      out << "| " << to_string(key.first) << " | " << key.second << " |";
      for (Method m : methods) {
        const ResultRow* row = nullptr;
        for (std::size_t i : g.rows) {
          const ResultRow& r = t.rows[i];
          if (r.cell.function == key.first && r.cell.n == key.second && r.method == m) {
            row = &r;
            break;
          }
        }
        if (!row) {
          out << " |";
          continue;
        }
        std::string entry = detail::fmt("%.2f", row->ratio) + " (" +
                            detail::fmt("%.3g", row->sd_mse) + ")";
        if (row->leader)
          entry = "**" + entry + "**";
        else if (row->p_value > alpha)
          entry += "*";
        out << ' ' << entry << " |";
      }
      out << '\n';
    }
    out << '\n';
  }
  out << "`**x**` = lowest mean MSE in the cell; `*` = not significantly different from it.\n";
  return out.str();
}

// Inverse of the CSV emitter, at emitted precision.  Accepts exactly the
// column set emit_table writes.
inline ResultTable parse_result_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("parse_result_csv: empty input");
  if (detail::trim(line) != "function,n,snr,noise,method,mean_mse,sd_mse,ratio,p_value,best_group")
    throw std::invalid_argument("parse_result_csv: unexpected header");
  ResultTable t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string tok; std::getline(ls, tok, ',');) f.push_back(tok);
    if (f.size() != 10)
      throw std::invalid_argument("parse_result_csv: line " + std::to_string(lineno) +
                                  ": expected 10 fields");
    ResultRow r;
    r.cell.function = parse_test_function(f[0]);
    r.cell.n = static_cast<std::size_t>(detail::parse_int(f[1]));
    r.cell.snr = detail::parse_double(f[2]);
    r.cell.noise = parse_noise_family(f[3]);
    r.method = parse_method(f[4]);
    r.mean_mse = detail::parse_double(f[5]);
    r.sd_mse = detail::parse_double(f[6]);
    r.ratio = detail::parse_double(f[7]);
    r.p_value = detail::parse_double(f[8]);
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace wavecv
