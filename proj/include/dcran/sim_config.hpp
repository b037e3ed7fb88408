/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dcran {

enum class Algorithm { kJmsra, kCranMode, kD2dMode };

std::string algorithm_name(Algorithm alg);
Algorithm parse_algorithm(const std::string& name);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-constraint limits in linear units, derived from SimConfig.
struct PowerLimits {
  double p_max_mw;       // per-pair transmit power cap (C4)
  double d2d_budget_mw;  // total power of D2D-mode pairs (C2)
  double fronthaul_cap;  // bit/s/Hz per RRH (C5), uniform
  double noise_mw;       // receiver noise power sigma^2
};

struct SimConfig {
  int n_rrh = 3;
  int n_pairs = 6;
  int n_antennas = 2;
  double area_side = 0.5;      // km
  double max_pair_dist = 0.2;  // km
  double bandwidth = 10e6;     // Hz, converts -174 dBm/Hz into sigma^2
  double p_max_dbm = 23.0;
  double p_i_dmax_dbm = 29.0;
  double fronthaul_cap = 10.0; // bit/s/Hz per RRH
  double v_param = 10.0;
  double lambda = 1.0;         // mean Poisson arrivals, bit/slot/Hz
  int slots = 5000;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::kJmsra;
  double outer_tol = 1e-3;     // per-pair rate change threshold
  int outer_max_iter = 50;

  double p_max_mw() const { return dbm_to_mw_(p_max_dbm); }
  double d2d_budget_mw() const { return dbm_to_mw_(p_i_dmax_dbm); }
  double noise_mw() const;
  PowerLimits limits() const;

  /// Throws ConfigError on out-of-range values.
  void validate() const;

 private:
  static double dbm_to_mw_(double dbm);
};

/// Parses a flat `key = value` file (one pair per line, `#` comments).
/// Unknown keys raise ConfigError.
SimConfig parse_config_file(const std::string& path);

/// Applies a single key/value pair onto cfg; throws ConfigError for unknown
/// keys or unparsable values.
void apply_config_entry(SimConfig& cfg, const std::string& key,
                        const std::string& value);

}  // namespace dcran
