// SPDX-License-Identifier: Apache-2.0
//
// Experiment runner: seeded Monte Carlo trials over the three configuration
// schemes, oracle validation on small instances, support-profile dumps and
// per-iteration convergence traces. All outputs are CSV and byte-reproducible
// from (config, seed).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fris/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitOracleGuard = 3;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment config");
  cmd->add_option("--seed", opts.seed, "master seed override");
  cmd->add_option("--trials", opts.trials, "trial count override");
  cmd->add_option("--out", opts.out, "output CSV path override");
  cmd->add_option("--threads", opts.threads, "worker thread count override");
}

fris::ExperimentConfig resolve_config(const CommonOpts& opts) {
  fris::ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = fris::load_config_file(opts.config_path);
  if (opts.seed) cfg.master_seed = *opts.seed;
  if (opts.trials) cfg.trials = *opts.trials;
  if (opts.out) cfg.out_path = *opts.out;
  if (opts.threads) cfg.threads = *opts.threads;
  return cfg;
}

void print_aggregates(const std::vector<fris::TrialRow>& rows, const std::string& prefix) {
  for (const fris::SchemeAggregate& a : fris::aggregate_rows(rows)) {
    std::cout << prefix << "scheme=" << a.scheme
              << " mean_rate=" << fris::format_double(a.mean_rate)
              << " mean_abs_z=" << fris::format_double(a.mean_abs_z)
              << " mean_iters=" << fris::format_double(a.mean_iters);
    if (a.mean_delta_g)
      std::cout << " mean_delta_g=" << fris::format_double(*a.mean_delta_g);
    std::cout << '\n';
  }
}

int cmd_run(const CommonOpts& opts) {
  const fris::ExperimentConfig cfg = resolve_config(opts);
  const auto points = fris::run_sweep(cfg);
  for (const fris::SweepPoint& pt : points) {
    std::string path = cfg.out_path;
    std::string prefix = "aggregate ";
    if (cfg.sweep) {
      path = fris::sweep_out_path(cfg.out_path, cfg.sweep->variable, pt.value);
      prefix = "aggregate " + cfg.sweep->variable + "=" + fris::format_double(pt.value) + " ";
    }
    fris::write_csv_file(path, [&](std::ostream& os) { fris::write_run_csv(pt.rows, os); });
    print_aggregates(pt.rows, prefix);
    std::cout << "wrote " << path << '\n';
  }
  return kExitOk;
}

int cmd_validate(const CommonOpts& opts) {
  const fris::ExperimentConfig cfg = resolve_config(opts);
  const fris::ValidationOutput out = fris::validate_against_oracle(cfg);
  fris::write_csv_file(cfg.out_path,
                       [&](std::ostream& os) { fris::write_run_csv(out.rows, os); });
  print_aggregates(out.rows, "aggregate ");
  std::cout << "subproblem_delta_g min=" << fris::format_double(out.subproblem_min)
            << " max=" << fris::format_double(out.subproblem_max) << '\n';
  std::cout << "wrote " << cfg.out_path << '\n';
  return kExitOk;
}

int cmd_profile(const CommonOpts& opts, std::size_t trial) {
  const fris::ExperimentConfig cfg = resolve_config(opts);
  const auto rows = fris::dump_support_profile(cfg, trial);
  fris::write_csv_file(cfg.out_path,
                       [&](std::ostream& os) { fris::write_profile_csv(rows, os); });
  std::cout << "wrote " << cfg.out_path << " (" << rows.size() << " samples)\n";
  return kExitOk;
}

int cmd_convergence(const CommonOpts& opts) {
  const fris::ExperimentConfig cfg = resolve_config(opts);
  const auto rows = fris::run_convergence(cfg);
  fris::write_csv_file(cfg.out_path,
                       [&](std::ostream& os) { fris::write_convergence_csv(rows, os); });
  std::cout << "wrote " << cfg.out_path << " (" << rows.size() << " iterations)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluid reflecting-surface port selection and discrete phase optimizer"};
  app.require_subcommand(1);

  CommonOpts run_opts, validate_opts, profile_opts, convergence_opts;
  std::size_t profile_trial = 0;

  CLI::App* run = app.add_subcommand("run", "Monte Carlo trials, optionally swept");
  add_common(run, run_opts);
  CLI::App* validate = app.add_subcommand("validate", "brute-force gain-ratio validation");
  add_common(validate, validate_opts);
  CLI::App* profile = app.add_subcommand("profile", "dump the directional support profile");
  add_common(profile, profile_opts);
  profile->add_option("--trial", profile_trial, "trial index whose channel is profiled");
  CLI::App* convergence = app.add_subcommand("convergence", "per-iteration trace");
  add_common(convergence, convergence_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (validate->parsed()) return cmd_validate(validate_opts);
    if (profile->parsed()) return cmd_profile(profile_opts, profile_trial);
    if (convergence->parsed()) return cmd_convergence(convergence_opts);
  } catch (const fris::InstanceTooLargeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOracleGuard;
  } catch (const fris::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
