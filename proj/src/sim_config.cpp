/* SPDX-License-Identifier: Apache-2.0 */
#include "dcran/sim_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dcran {

std::string algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::kJmsra:
      return "jmsra";
    case Algorithm::kCranMode:
      return "cran";
    case Algorithm::kD2dMode:
      return "d2d";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "jmsra") return Algorithm::kJmsra;
  if (name == "cran" || name == "cran_mode") return Algorithm::kCranMode;
  if (name == "d2d" || name == "d2d_mode") return Algorithm::kD2dMode;
  throw ConfigError("unknown algorithm: " + name);
}

double SimConfig::dbm_to_mw_(double dbm) { return std::pow(10.0, dbm / 10.0); }

double SimConfig::noise_mw() const {
  // -174 dBm/Hz density over the configured bandwidth
  const double noise_dbm = -174.0 + 10.0 * std::log10(bandwidth);
  return dbm_to_mw_(noise_dbm);
}

PowerLimits SimConfig::limits() const {
  return PowerLimits{p_max_mw(), d2d_budget_mw(), fronthaul_cap, noise_mw()};
}

void SimConfig::validate() const {
  if (n_rrh < 1 || n_pairs < 1 || n_antennas < 1)
    throw ConfigError("n_rrh, n_pairs, n_antennas must be >= 1");
  if (slots < 1) throw ConfigError("slots must be >= 1");
  if (area_side <= 0.0) throw ConfigError("area_side must be > 0");
  if (max_pair_dist < 0.0) throw ConfigError("max_pair_dist must be >= 0");
  if (bandwidth <= 0.0) throw ConfigError("bandwidth must be > 0");
  if (!std::isfinite(p_max_dbm) || !std::isfinite(p_i_dmax_dbm))
    throw ConfigError("power limits must be finite");
  if (fronthaul_cap < 0.0) throw ConfigError("fronthaul_cap must be >= 0");
  if (v_param < 0.0) throw ConfigError("v_param must be >= 0");
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (outer_tol <= 0.0) throw ConfigError("outer_tol must be > 0");
  if (outer_max_iter < 1) throw ConfigError("outer_max_iter must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": " + value);
  }
  if (used != value.size())
    throw ConfigError("bad numeric value for " + key + ": " + value);
  return out;
}

long long to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  const long long i = static_cast<long long>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("expected integer for " + key + ": " + value);
  return i;
}

}  // namespace

void apply_config_entry(SimConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "n_rrh") {
    cfg.n_rrh = static_cast<int>(to_int(key, value));
  } else if (key == "n_pairs") {
    cfg.n_pairs = static_cast<int>(to_int(key, value));
  } else if (key == "n_antennas") {
    cfg.n_antennas = static_cast<int>(to_int(key, value));
  } else if (key == "area_side") {
    cfg.area_side = to_double(key, value);
  } else if (key == "max_pair_dist") {
    cfg.max_pair_dist = to_double(key, value);
  } else if (key == "bandwidth") {
    cfg.bandwidth = to_double(key, value);
  } else if (key == "p_max_dbm") {
    cfg.p_max_dbm = to_double(key, value);
  } else if (key == "p_i_dmax_dbm") {
    cfg.p_i_dmax_dbm = to_double(key, value);
  } else if (key == "fronthaul_cap") {
    cfg.fronthaul_cap = to_double(key, value);
  } else if (key == "v_param") {
    cfg.v_param = to_double(key, value);
  } else if (key == "lambda") {
    cfg.lambda = to_double(key, value);
  } else if (key == "slots") {
    cfg.slots = static_cast<int>(to_int(key, value));
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
  } else if (key == "algorithm") {
    cfg.algorithm = parse_algorithm(value);
  } else if (key == "outer_tol") {
    cfg.outer_tol = to_double(key, value);
  } else if (key == "outer_max_iter") {
    cfg.outer_max_iter = static_cast<int>(to_int(key, value));
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

SimConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  SimConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected `key = value`");
    apply_config_entry(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

}  // namespace dcran
