// Command-line front end: Monte-Carlo comparisons, one-file denoising, and
// test-signal generation.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include <wavecv/wavecv.hpp>

namespace {

int run_simulate(const std::string& cfg_path, const std::string& out_path,
                 const std::string& md_path, int threads, double alpha) {
  const wavecv::SimulationConfig cfg = wavecv::load_simulation_config(cfg_path);
  const wavecv::ResultTable table = wavecv::run_simulation(cfg, threads);
  for (const std::string& e : table.errors) std::cerr << "wavecv: " << e << '\n';
  if (table.rows.empty()) {
    std::cerr << "wavecv: no valid cells in the grid\n";
    return 1;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << wavecv::emit_table(table, wavecv::TableFormat::csv, alpha);
  if (!out) throw std::runtime_error("write failed: " + out_path);
  if (!md_path.empty()) {
    std::ofstream md(md_path);
    if (!md) throw std::runtime_error("cannot open output file: " + md_path);
    md << wavecv::emit_table(table, wavecv::TableFormat::markdown, alpha);
    if (!md) throw std::runtime_error("write failed: " + md_path);
  }
  return 0;
}

int run_denoise(const std::string& in_path, const std::string& method,
                const std::string& filter, const std::string& rule, int j0_offset,
                const std::string& out_path, const std::string& diag_path) {
  wavecv::DenoiseOptions opt;
  opt.method = wavecv::parse_method(method);
  opt.filter = filter;
  if (rule == "hard")
    opt.rule = wavecv::ThresholdRule::hard;
  else if (rule == "soft")
    opt.rule = wavecv::ThresholdRule::soft;
  else
    throw std::invalid_argument("unknown rule: " + rule);
  opt.j0_offset = j0_offset;
  const wavecv::DenoiseResult r = wavecv::denoise_file(in_path, opt);
  wavecv::write_series_csv(out_path, r.denoised);
  if (!diag_path.empty()) {
    std::ofstream out(diag_path);
    if (!out) throw std::runtime_error("cannot open output file: " + diag_path);
    out << wavecv::diagnostics_json(r.diag).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + diag_path);
  }
  return 0;
}

int run_gen_signals(const std::string& function, long long n, const std::string& noise,
                    bool has_snr, double snr, std::uint64_t seed) {
  if (n < 8) throw std::invalid_argument("--n must be >= 8");
  const wavecv::TestFunctionId id = wavecv::parse_test_function(function);
  const wavecv::Signal f = wavecv::test_function(id, static_cast<std::size_t>(n));
  wavecv::Signal y = f;
  if (!noise.empty()) {
    const wavecv::NoiseFamily family = wavecv::parse_noise_family(noise);
    std::mt19937_64 rng(seed);
    const std::vector<double> raw =
        wavecv::sample_noise(family, static_cast<std::size_t>(n), rng);
    if (wavecv::has_finite_variance(family)) {
      if (!has_snr)
        throw std::invalid_argument("--snr is required for noise family " + noise);
      y = wavecv::scale_to_snr(f, raw, snr);
    } else {
      if (has_snr)
        throw std::invalid_argument("--snr is undefined for noise family " + noise);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += raw[i];
    }
  } else if (has_snr) {
    throw std::invalid_argument("--snr requires --noise");
  }
  char buf[96];
  std::fputs("x,f,y\n", stdout);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = static_cast<double>(i + 1) / static_cast<double>(n);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", x, f[i], y[i]);
    std::fputs(buf, stdout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavelet denoising with cross-validated block thresholds"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a Monte-Carlo comparison grid");
  std::string cfg_path, out_path, md_path;
  int threads = 1;
  double alpha = 0.05;
  sim->add_option("--config", cfg_path, "flat key = value config file")->required();
  sim->add_option("--out", out_path, "output CSV path")->required();
  sim->add_option("--threads", threads, "worker threads; output is identical for any count");
  sim->add_option("--markdown", md_path, "also write a markdown rendering to this path");
  sim->add_option("--alpha", alpha, "significance level for the best_group flag");

  auto* den = app.add_subcommand("denoise", "denoise a one-column series file");
  std::string in_path, method, filter = "la8", rule = "hard", den_out, diag_path;
  int j0_offset = 4;
  den->add_option("--in", in_path, "input file, one number per line")->required();
  den->add_option("--method", method,
                  "ld_block | nason | visushrink_hard | visushrink_soft | sureshrink | "
                  "hybridshrink")
      ->required();
  den->add_option("--filter", filter, "la8 | haar");
  den->add_option("--rule", rule, "hard | soft (nason only)");
  den->add_option("--j0-offset", j0_offset, "coarsest thresholded level is J minus this");
  den->add_option("--out", den_out, "output CSV path, one value per line")->required();
  den->add_option("--diagnostics", diag_path, "write a JSON diagnostics record here");

  auto* gen = app.add_subcommand("gen-signals", "emit a test function as CSV (x,f,y)");
  std::string function, noise;
  long long n = 0;
  double snr = 0.0;
  std::uint64_t seed = 1;
  gen->add_option("--function", function,
                  "blip | blocks | bumps | corner | doppler | heavisine | spikes | wave")
      ->required();
  gen->add_option("--n", n, "number of samples")->required();
  gen->add_option("--noise", noise, "normal | t3 | lognormal | cauchy");
  gen->add_option("--snr", snr, "signal-to-noise ratio (finite-variance noise only)");
  gen->add_option("--seed", seed, "noise RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "wavecv: " << e.what() << '\n'
              << "usage: wavecv <simulate|denoise|gen-signals> [options]; --help for details\n";
    return 2;
  }

  try {
    if (sim->parsed()) return run_simulate(cfg_path, out_path, md_path, threads, alpha);
    if (den->parsed())
      return run_denoise(in_path, method, filter, rule, j0_offset, den_out, diag_path);
    if (gen->parsed())
      return run_gen_signals(function, n, noise, gen->count("--snr") > 0, snr, seed);
  } catch (const std::exception& e) {
    std::cerr << "wavecv: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
