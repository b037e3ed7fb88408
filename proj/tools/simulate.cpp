/* SPDX-License-Identifier: Apache-2.0 */
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcran/sim_config.hpp"
#include "dcran/sim_harness.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::optional<std::string> algorithm;
  std::optional<double> v_param;
  std::optional<double> lambda;
  std::optional<int> slots;
  std::optional<std::uint64_t> seed;
  bool strict = false;
};

void add_common(CLI::App* sub, CommonOpts* opts) {
  sub->add_option("--config", opts->config_path,
                  "flat key = value config file");
  sub->add_option("--algorithm", opts->algorithm, "jmsra|cran|d2d");
  sub->add_option("--v", opts->v_param, "control parameter V");
  sub->add_option("--lambda", opts->lambda, "mean arrival rate, bit/slot/Hz");
  sub->add_option("--slots", opts->slots, "slots per run");
  sub->add_option("--seed", opts->seed, "random seed");
  sub->add_option("--out", opts->out_path, "output CSV path")->required();
  sub->add_flag("--strict", opts->strict,
                "exit 2 if any slot solver failed to converge");
}

dcran::SimConfig build_config(const CommonOpts& opts) {
  dcran::SimConfig cfg = opts.config_path.empty()
                             ? dcran::SimConfig{}
                             : dcran::parse_config_file(opts.config_path);
  if (opts.algorithm) cfg.algorithm = dcran::parse_algorithm(*opts.algorithm);
  if (opts.v_param) cfg.v_param = *opts.v_param;
  if (opts.lambda) cfg.lambda = *opts.lambda;
  if (opts.slots) cfg.slots = *opts.slots;
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Slot-based simulator for joint mode selection, uplink beamforming and "
      "power control in a C-RAN with underlay D2D pairs"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "run one experiment");
  add_common(sim, &sim_opts);

  CommonOpts sweep_opts;
  std::string axis;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<std::string> algorithms{"jmsra", "cran", "d2d"};
  int jobs = 1;
  CLI::App* swp = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(swp, &sweep_opts);
  swp->add_option("--axis", axis, "v|lambda|fronthaul|distance")->required();
  swp->add_option("--values", values, "comma-separated axis values")
      ->required()
      ->delimiter(',');
  swp->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
  swp->add_option("--algorithms", algorithms, "subset of jmsra,cran,d2d")
      ->delimiter(',');
  swp->add_option("--jobs", jobs, "parallel runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) {
      const dcran::SimConfig cfg = build_config(sim_opts);
      const dcran::ExperimentResult result = dcran::run_experiment(cfg);
      dcran::write_csv(result, sim_opts.out_path);
      if (sim_opts.strict && !result.summary.all_converged) {
        std::cerr << "strict: solver non-convergence in at least one slot\n";
        return 2;
      }
    } else {
      const dcran::SimConfig base = build_config(sweep_opts);
      std::vector<dcran::Algorithm> algs;
      for (const std::string& name : algorithms)
        algs.push_back(dcran::parse_algorithm(name));
      const auto points =
          dcran::run_sweep(base, axis, values, seeds, algs, jobs);
      dcran::write_sweep_csv(points, sweep_opts.out_path);
    }
  } catch (const dcran::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const dcran::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
