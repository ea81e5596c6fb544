// Command-line driver: evolves G4V spin states under the phonon-coupling
// master equation and writes plot-ready CSV tables.
//
// Subcommands:
//   single-spin  coherence decay of one spin from (|1>+|2>)/sqrt(2)
//   bell-pair    hashing-bound decay of an entangled pair
//   link-sweep   midpoint-swap link quality vs length, with latency
//   fit          exponential decay fit of an existing CSV column
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "g4v/run.hpp"

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw g4v::ConfigError("cannot open output file: " + path);
  out << content;
  if (!out) throw g4v::ConfigError("failed writing output file: " + path);
}

std::string resolve_out(const g4v::RunConfig& cfg, const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (!cfg.output_path.empty()) return cfg.output_path;
  throw g4v::ConfigError(
      "no output path: pass --out or set 'output_path' in the config");
}

// Side files (fit summaries, matrix dumps) go next to the main CSV.
std::string with_suffix(const std::string& path, const std::string& suffix) {
  std::size_t dot = path.find_last_of('.');
  std::size_t sep = path.find_last_of('/');
  if (dot == std::string::npos || (sep != std::string::npos && dot < sep))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phonon-decoherence simulator for group-IV color-center spins"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  unsigned long long seed = 0;  // reserved; all computation is deterministic

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_path, "output CSV path (overrides output_path)");
    sub->add_option("--seed", seed, "reserved, unused");
  };

  CLI::App* single = app.add_subcommand(
      "single-spin", "single-spin coherence decay and tau_C1 fit");
  add_common(single);
  CLI::App* bell = app.add_subcommand(
      "bell-pair", "Bell-pair hashing-bound decay and tau_C2 fit");
  add_common(bell);
  CLI::App* link = app.add_subcommand(
      "link-sweep", "midpoint-swap link sweep over length and temperature");
  add_common(link);

  CLI::App* fit = app.add_subcommand("fit", "exponential fit of a CSV column");
  std::string in_path, t_col, v_col, group_col;
  double amplitude = 0.0, floor_fraction = 1e-6;
  bool have_amplitude = false;
  fit->add_option("--in", in_path, "input CSV")->required();
  fit->add_option("--t-col", t_col, "time column name")->required();
  fit->add_option("--value-col", v_col, "value column name")->required();
  fit->add_option("--group-col", group_col, "optional group column name");
  fit->add_option("--amplitude", amplitude, "fix the model amplitude")
      ->each([&](const std::string&) { have_amplitude = true; });
  fit->add_option("--floor", floor_fraction, "exclusion floor as fraction of v(0)");
  fit->add_option("--out", out_path, "output CSV path")->required();
  fit->add_option("--seed", seed, "reserved, unused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (single->parsed()) {
      g4v::RunConfig cfg = g4v::parse_run_config_file(config_path);
      std::string out = resolve_out(cfg, out_path);
      g4v::SingleSpinOutput result = g4v::run_single_spin(cfg);
      write_file(out, result.series_csv);
      write_file(with_suffix(out, ".summary"), result.summary_csv);
    } else if (bell->parsed()) {
      g4v::RunConfig cfg = g4v::parse_run_config_file(config_path);
      std::string out = resolve_out(cfg, out_path);
      g4v::BellPairOutput result = g4v::run_bell_pair(cfg);
      write_file(out, result.series_csv);
      write_file(with_suffix(out, ".summary"), result.summary_csv);
    } else if (link->parsed()) {
      g4v::RunConfig cfg = g4v::parse_run_config_file(config_path);
      std::string out = resolve_out(cfg, out_path);
      g4v::LinkSweepOutput result = g4v::run_link_sweep(cfg);
      write_file(out, result.series_csv);
      write_file(with_suffix(out, ".matrices"), result.matrices_csv);
    } else if (fit->parsed()) {
      std::ifstream in(in_path);
      if (!in) throw g4v::ConfigError("cannot open fit input: " + in_path);
      g4v::FitRequest request;
      request.t_column = t_col;
      request.value_column = v_col;
      if (!group_col.empty()) request.group_column = group_col;
      if (have_amplitude) request.amplitude = amplitude;
      request.floor_fraction = floor_fraction;
      write_file(out_path, g4v::run_fit(in, request));
    }
  } catch (const g4v::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
