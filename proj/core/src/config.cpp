#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "g4v/run.hpp"

namespace g4v {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
  }
  if (consumed != text.size() || !std::isfinite(v))
    throw ConfigError("config key '" + key + "': not a finite number: '" + text + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty value");
  return out;
}

}  // namespace

ModelConstants RunConfig::constants_at(double temperature_k) const {
  double g = g0chi0 ? *g0chi0 : g0chi0_for_rate(*gamma_s_inv, delta_hz);
  return ModelConstants::make(delta_hz, temperature_k, g, omega_a_prime_rad_s);
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  LinkBlock link;
  bool in_link = false;
  bool have_link = false;
  std::set<std::string> seen;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s == "[link]") {
      in_link = true;
      have_link = true;
      continue;
    }
    if (s.front() == '[')
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown section '" + s + "'");

    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    std::string scoped = (in_link ? "link." : "") + key;
    if (!seen.insert(scoped).second)
      throw ConfigError("config key '" + scoped + "': duplicated");

    if (in_link) {
      if (key == "length_km") link.lengths_km = parse_double_list(scoped, value);
      else if (key == "alpha_db_per_km") link.alpha_db_per_km = parse_double(scoped, value);
      else if (key == "c_medium") link.c_medium = parse_double(scoped, value);
      else if (key == "dark_count_prob") link.dark_count_prob = parse_double(scoped, value);
      else if (key == "visibility") link.visibility = parse_double(scoped, value);
      else if (key == "encoding") {
        if (value == "single_rail") link.encoding = RailEncoding::single_rail;
        else if (value == "dual_rail") link.encoding = RailEncoding::dual_rail;
        else
          throw ConfigError(
              "config key 'link.encoding': expected single_rail or dual_rail, got '" +
              value + "'");
      } else
        throw ConfigError("config key '" + scoped + "': unknown key");
      continue;
    }

    if (key == "delta_hz") cfg.delta_hz = parse_double(key, value);
    else if (key == "temperature_k") cfg.temperatures_k = parse_double_list(key, value);
    else if (key == "g0chi0") cfg.g0chi0 = parse_double(key, value);
    else if (key == "gamma_s_inv") cfg.gamma_s_inv = parse_double(key, value);
    else if (key == "omega_a_prime_rad_s") cfg.omega_a_prime_rad_s = parse_double(key, value);
    else if (key == "t_max_s") cfg.t_max_s = parse_double(key, value);
    else if (key == "n_samples") {
      double v = parse_double(key, value);
      if (v != std::floor(v))
        throw ConfigError("config key 'n_samples': must be an integer");
      cfg.n_samples = static_cast<int>(v);
    } else if (key == "output_path") cfg.output_path = value;
    else throw ConfigError("config key '" + key + "': unknown key");
  }

  // Validation
  if (cfg.delta_hz <= 0.0)
    throw ConfigError("config key 'delta_hz': required and must be > 0");
  if (cfg.temperatures_k.empty())
    throw ConfigError("config key 'temperature_k': required");
  for (double t : cfg.temperatures_k)
    if (t <= 0.0) throw ConfigError("config key 'temperature_k': values must be > 0");
  if (cfg.g0chi0.has_value() == cfg.gamma_s_inv.has_value())
    throw ConfigError(
        "config keys 'g0chi0'/'gamma_s_inv': exactly one must be present");
  if (cfg.g0chi0 && *cfg.g0chi0 < 0.0)
    throw ConfigError("config key 'g0chi0': must be >= 0");
  if (cfg.gamma_s_inv && *cfg.gamma_s_inv < 0.0)
    throw ConfigError("config key 'gamma_s_inv': must be >= 0");
  if (cfg.t_max_s <= 0.0)
    throw ConfigError("config key 't_max_s': required and must be > 0");
  if (cfg.n_samples < 3)
    throw ConfigError("config key 'n_samples': must be >= 3");

  if (have_link) {
    if (link.lengths_km.empty())
      throw ConfigError("config key 'link.length_km': required in [link]");
    for (double l : link.lengths_km)
      if (l < 0.0) throw ConfigError("config key 'link.length_km': values must be >= 0");
    if (link.alpha_db_per_km < 0.0)
      throw ConfigError("config key 'link.alpha_db_per_km': must be >= 0");
    if (link.c_medium <= 0.0)
      throw ConfigError("config key 'link.c_medium': must be > 0");
    if (link.dark_count_prob != 0.0)
      throw ConfigError("config key 'link.dark_count_prob': only 0 supported");
    if (link.visibility != 1.0)
      throw ConfigError("config key 'link.visibility': only 1 supported");
    cfg.link = link;
  }
  return cfg;
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_run_config(in);
}

}  // namespace g4v
