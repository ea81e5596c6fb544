#include "g4v/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>

#include "g4v/lindblad.hpp"
#include "g4v/metrics.hpp"

namespace g4v {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::string join_doubles(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ',';
    out += format_double(vs[i]);
  }
  return out;
}

// Resolved-config echo embedded as the leading comment line of every CSV,
// making outputs self-describing and reruns comparable.
std::string config_comment(const RunConfig& cfg) {
  double g0chi0 = cfg.g0chi0 ? *cfg.g0chi0 : g0chi0_for_rate(*cfg.gamma_s_inv, cfg.delta_hz);
  double gamma = coupling_rate(g0chi0, cfg.delta_hz);
  double omega = cfg.omega_a_prime_rad_s.value_or(2.0 * M_PI * cfg.delta_hz);

  std::string s = "# config:";
  s += " delta_hz=" + format_double(cfg.delta_hz);
  s += " temperature_k=" + join_doubles(cfg.temperatures_k);
  s += " g0chi0=" + format_double(g0chi0);
  s += " gamma_s_inv=" + format_double(gamma);
  s += " omega_a_prime_rad_s=" + format_double(omega);
  s += " t_max_s=" + format_double(cfg.t_max_s);
  s += " n_samples=" + std::to_string(cfg.n_samples);
  if (cfg.link) {
    s += " link.length_km=" + join_doubles(cfg.link->lengths_km);
    s += " link.alpha_db_per_km=" + format_double(cfg.link->alpha_db_per_km);
    s += " link.c_medium=" + format_double(cfg.link->c_medium);
    s += std::string(" link.encoding=") +
         (cfg.link->encoding == RailEncoding::single_rail ? "single_rail" : "dual_rail");
    s += " link.dark_count_prob=" + format_double(cfg.link->dark_count_prob);
    s += " link.visibility=" + format_double(cfg.link->visibility);
  }
  s += "\n";
  return s;
}

std::vector<double> sample_times(const RunConfig& cfg) {
  std::vector<double> ts(cfg.n_samples);
  for (int i = 0; i < cfg.n_samples; ++i)
    ts[i] = cfg.t_max_s * static_cast<double>(i) /
            static_cast<double>(cfg.n_samples - 1);
  return ts;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SingleSpinOutput run_single_spin(const RunConfig& cfg) {
  ComplexVector psi0 = ComplexVector::Zero(4);
  psi0(0) = kInvSqrt2;
  psi0(1) = kInvSqrt2;
  PureState initial(SystemShape::single(4), psi0);
  DensityOperator rho0 = DensityOperator::from_pure(initial);
  std::vector<double> ts = sample_times(cfg);

  std::string comment = config_comment(cfg);
  std::string series = comment + "T,t,re_rho12,im_rho12,abs_rho12,fidelity\n";
  std::string summary = comment + "T,tau_c1,residual_rms\n";

  for (double temp : cfg.temperatures_k) {
    ModelConstants c = cfg.constants_at(temp);
    Liouvillian lv = build_generator(c);
    std::vector<double> abs12(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      DensityOperator rho = spectral_propagator(lv, ts[i]).apply(rho0);
      Complex r12 = coherence_element(rho, 0, 1);
      abs12[i] = std::abs(r12);
      series += format_double(temp) + "," + format_double(ts[i]) + "," +
                format_double(r12.real()) + "," + format_double(r12.imag()) + "," +
                format_double(abs12[i]) + "," +
                format_double(fidelity(rho, initial)) + "\n";
    }
    FitResult fit = fit_exponential(DecayCurve(ts, abs12), 0.5);
    summary += format_double(temp) + "," + format_double(fit.tau_s) + "," +
               format_double(fit.residual_rms) + "\n";
  }
  return {std::move(series), std::move(summary)};
}

BellPairOutput run_bell_pair(const RunConfig& cfg) {
  ComplexVector bell = ComplexVector::Zero(16);
  bell(0 * 4 + 1) = kInvSqrt2;  // |1,2>
  bell(1 * 4 + 0) = kInvSqrt2;  // |2,1>
  DensityOperator rho0 =
      DensityOperator::from_pure(PureState(SystemShape({4, 4}), bell));
  std::vector<double> ts = sample_times(cfg);

  std::string comment = config_comment(cfg);
  std::string series = comment + "T,t,hashing_bound\n";
  std::string summary = comment + "T,tau_c2\n";

  for (double temp : cfg.temperatures_k) {
    ModelConstants c = cfg.constants_at(temp);
    Liouvillian lv = build_generator(c);
    std::vector<double> info(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      Propagator pair = multi_spin_propagator(spectral_propagator(lv, ts[i]), 2);
      info[i] = hashing_bound(pair.apply(rho0), 4, 4);
      series += format_double(temp) + "," + format_double(ts[i]) + "," +
                format_double(info[i]) + "\n";
    }
    FitResult fit = fit_exponential(DecayCurve(ts, info), 1.0);
    summary += format_double(temp) + "," + format_double(fit.tau_s) + "\n";
  }
  return {std::move(series), std::move(summary)};
}

LinkSweepOutput run_link_sweep(const RunConfig& cfg) {
  if (!cfg.link)
    throw ConfigError("config section '[link]': required for link-sweep");
  const LinkBlock& lb = *cfg.link;
  const char* enc_name =
      lb.encoding == RailEncoding::single_rail ? "single_rail" : "dual_rail";

  std::string comment = config_comment(cfg);
  std::string series =
      comment + "encoding,T,L_km,I_at_swap,I_at_herald,success_prob\n";

  // Four marked grid points for the density-matrix dump, spread across the
  // length grid; heralded (post-latency) states at the first temperature.
  std::size_t n = lb.lengths_km.size();
  std::vector<std::size_t> marks{0, (n - 1) / 3, 2 * (n - 1) / 3, n - 1};
  std::vector<std::size_t> unique_marks;
  for (std::size_t m : marks)
    if (unique_marks.empty() || unique_marks.back() != m) unique_marks.push_back(m);

  std::string matrices = comment + "encoding,T,L_km,part";
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      matrices += ",m" + std::to_string(i) + "_" + std::to_string(j);
  matrices += "\n";

  for (double temp : cfg.temperatures_k) {
    ModelConstants c = cfg.constants_at(temp);
    for (std::size_t li = 0; li < lb.lengths_km.size(); ++li) {
      LinkConfig lc;
      lc.length_km = lb.lengths_km[li];
      lc.alpha_db_per_km = lb.alpha_db_per_km;
      lc.c_medium = lb.c_medium;
      lc.encoding = lb.encoding;
      lc.dark_count_prob = lb.dark_count_prob;
      lc.visibility = lb.visibility;

      HeraldedLinkState at_swap = link_state_at(lc, c, LinkStage::at_swap);
      HeraldedLinkState at_herald = link_state_at(lc, c, LinkStage::at_herald);
      series += std::string(enc_name) + "," + format_double(temp) + "," +
                format_double(lc.length_km) + "," +
                format_double(hashing_bound(at_swap.rho, 4, 4)) + "," +
                format_double(hashing_bound(at_herald.rho, 4, 4)) + "," +
                format_double(at_swap.success_prob) + "\n";

      bool marked = temp == cfg.temperatures_k.front() &&
                    std::find(unique_marks.begin(), unique_marks.end(), li) !=
                        unique_marks.end();
      if (marked) {
        for (const char* part : {"re", "im"}) {
          matrices += std::string(enc_name) + "," + format_double(temp) + "," +
                      format_double(lc.length_km) + "," + part;
          for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
              Complex v = at_herald.rho.matrix(i, j);
              matrices += "," + format_double(part[0] == 'r' ? v.real() : v.imag());
            }
          matrices += "\n";
        }
      }
    }
  }
  return {std::move(series), std::move(matrices)};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

std::string run_fit(std::istream& csv_in, const FitRequest& request) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(csv_in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw ConfigError("fit input: no header row found");

  auto column_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ConfigError("fit input: column '" + name + "' not found in header");
  };
  std::size_t t_col = column_of(request.t_column);
  std::size_t v_col = column_of(request.value_column);
  std::optional<std::size_t> g_col;
  if (request.group_column) g_col = column_of(*request.group_column);

  auto parse_cell = [](const std::string& cell, int at_line) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &consumed);
    } catch (const std::exception&) {
      throw ConfigError("fit input line " + std::to_string(at_line) +
                        ": not a number: '" + cell + "'");
    }
    if (consumed != cell.size() || !std::isfinite(v))
      throw ConfigError("fit input line " + std::to_string(at_line) +
                        ": not a finite number: '" + cell + "'");
    return v;
  };

  std::vector<std::string> group_order;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  while (std::getline(csv_in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ConfigError("fit input line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " columns, got " +
                        std::to_string(cells.size()));
    std::string key = g_col ? cells[*g_col] : std::string("all");
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) group_order.push_back(key);
    it->second.first.push_back(parse_cell(cells[t_col], line_no));
    it->second.second.push_back(parse_cell(cells[v_col], line_no));
  }
  if (groups.empty()) throw ConfigError("fit input: no data rows");

  std::string out = "# fit: t_column=" + request.t_column +
                    " value_column=" + request.value_column;
  if (request.group_column) out += " group_column=" + *request.group_column;
  if (request.amplitude) out += " amplitude=" + format_double(*request.amplitude);
  out += " floor=" + format_double(request.floor_fraction) + "\n";
  out += "group,tau,amplitude,residual_rms\n";

  for (const auto& key : group_order) {
    const auto& [ts, vs] = groups[key];
    FitResult fit;
    try {
      fit = fit_exponential(DecayCurve(ts, vs), request.amplitude,
                            request.floor_fraction);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("fit of group '" + key + "': " + e.what());
    }
    out += key + "," + format_double(fit.tau_s) + "," +
           format_double(fit.amplitude) + "," + format_double(fit.residual_rms) +
           "\n";
  }
  return out;
}

}  // namespace g4v
