#include "axprox/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct CliOverrides {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long iters = 0;
  bool iters_set = false;
  std::string out_dir;
};

void add_common(CLI::App* sub, CliOverrides& opt) {
  sub->add_option("--config", opt.config_path, "experiment configuration file")
      ->required();
  sub->add_option("--seed", opt.seed, "run only this seed (overrides config)")
      ->each([&opt](const std::string&) { opt.seed_set = true; });
  sub->add_option("--iters", opt.iters,
                  "iteration count (overrides config)")
      ->each([&opt](const std::string&) { opt.iters_set = true; });
  sub->add_option("--out", opt.out_dir, "output directory (overrides config)");
}

int dispatch(const CliOverrides& opt, axprox::RunMode mode) {
  axprox::ExperimentConfig config =
      axprox::load_experiment_config(opt.config_path);
  if (opt.seed_set) config.seeds = {opt.seed};
  if (opt.iters_set) {
    if (opt.iters < 0) throw axprox::ConfigError("--iters must be nonnegative");
    config.solver_config.max_iter = opt.iters;
  }
  if (!opt.out_dir.empty()) config.out_dir = opt.out_dir;
  return axprox::run_experiment(config, mode);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite-optimization solver suite: approximate "
               "proximal-gradient and splitting methods with probabilistic "
               "convergence bounds"};
  app.require_subcommand(1);

  CliOverrides solve_opt, bounds_opt, compare_opt, validate_opt, build_opt;
  add_common(app.add_subcommand("solve", "run the configured solver and write "
                                         "per-seed trace CSVs"),
             solve_opt);
  add_common(app.add_subcommand("bounds", "evaluate bound curves only"),
             bounds_opt);
  add_common(app.add_subcommand(
                 "compare", "run the solver and evaluate bounds at every "
                            "iteration (trace + bound columns)"),
             compare_opt);
  add_common(app.add_subcommand("validate-errors",
                                "Monte-Carlo compliance report for the "
                                "configured error models"),
             validate_opt);
  add_common(app.add_subcommand("mpc-build",
                                "condense the MPC problem and write H, q, "
                                "lambda, F, Phi to files"),
             build_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("solve"))
      return dispatch(solve_opt, axprox::RunMode::solve);
    if (app.got_subcommand("bounds"))
      return dispatch(bounds_opt, axprox::RunMode::bounds);
    if (app.got_subcommand("compare"))
      return dispatch(compare_opt, axprox::RunMode::compare);
    if (app.got_subcommand("validate-errors"))
      return dispatch(validate_opt, axprox::RunMode::validate_errors);
    if (app.got_subcommand("mpc-build"))
      return dispatch(build_opt, axprox::RunMode::mpc_build);
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const axprox::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const axprox::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
