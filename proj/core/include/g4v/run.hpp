#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "g4v/link.hpp"
#include "g4v/model.hpp"
#include "g4v/types.hpp"

namespace g4v {

/// Link section of a run configuration. `length_km` may be a grid.
struct LinkBlock {
  std::vector<double> lengths_km;
  double alpha_db_per_km = 0.2;
  double c_medium = 2.0e8;
  RailEncoding encoding = RailEncoding::dual_rail;
  double dark_count_prob = 0.0;
  double visibility = 1.0;
};

/// Parsed `key = value` run configuration with one optional [link] section.
struct RunConfig {
  double delta_hz = 0.0;
  std::vector<double> temperatures_k;
  std::optional<double> g0chi0;
  std::optional<double> gamma_s_inv;
  std::optional<double> omega_a_prime_rad_s;
  double t_max_s = 0.0;
  int n_samples = 0;
  std::optional<LinkBlock> link;
  std::string output_path;

  /// Effective constants at one grid temperature.
  ModelConstants constants_at(double temperature_k) const;
};

/// Parses and validates. Throws ConfigError naming the offending key or line.
RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_file(const std::string& path);

/// Formats a double with 17 significant digits, '.' decimal separator.
std::string format_double(double v);

struct SingleSpinOutput {
  std::string series_csv;   // T,t,re_rho12,im_rho12,abs_rho12,fidelity
  std::string summary_csv;  // T,tau_c1,residual_rms
};
SingleSpinOutput run_single_spin(const RunConfig& cfg);

struct BellPairOutput {
  std::string series_csv;   // T,t,hashing_bound
  std::string summary_csv;  // T,tau_c2
};
BellPairOutput run_bell_pair(const RunConfig& cfg);

struct LinkSweepOutput {
  std::string series_csv;    // encoding,T,L_km,I_at_swap,I_at_herald,success_prob
  std::string matrices_csv;  // heralded two-spin matrices at four marked lengths
};
LinkSweepOutput run_link_sweep(const RunConfig& cfg);

/// Column selection for the fit command.
struct FitRequest {
  std::string t_column;
  std::string value_column;
  std::optional<std::string> group_column;
  std::optional<double> amplitude;
  double floor_fraction = 1e-6;
};

/// Fits one exponential per group of a CSV table produced by the other
/// commands (or any table with compatible columns). Output columns:
/// group,tau,amplitude,residual_rms.
std::string run_fit(std::istream& csv_in, const FitRequest& request);

}  // namespace g4v
