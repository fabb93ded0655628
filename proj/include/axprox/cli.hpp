#pragma once

#include <map>
#include <string>
#include <vector>

#include "axprox/bounds.hpp"
#include "axprox/mpc.hpp"
#include "axprox/solvers.hpp"

namespace axprox {

/// INI-style key/value configuration: `key = value` lines, `[section]`
/// headers flattening to "section.key", `#` or `;` comments. Values keep
/// their raw text; typed getters parse on access and raise ConfigError
/// naming the offending key.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_string(const std::string& text,
                                const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::uint64_t> get_u64_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

enum class ProblemSource { lasso_file, mpc_spec, builtin_test };
enum class SolverKind { axpgd, axapgd, axwlmadmm };
enum class RunMode { solve, bounds, compare, validate_errors, mpc_build };

struct ExperimentConfig {
  ProblemSource source = ProblemSource::builtin_test;
  SolverKind solver = SolverKind::axpgd;
  SolverConfig solver_config;  // stepsize_s == 0 requests the largest
                               // admissible stepsize for the problem
  std::vector<std::uint64_t> seeds;
  std::string out_dir = ".";
  PriorBound prior = PriorBound::hamadouche_basic;
  ConfigMap raw;          // retained for bound overrides and problem files
  std::string base_dir;   // config file directory; resolves relative paths
};

/// Parse and validate an experiment configuration file. CLI overrides
/// (seed/iters/out) are applied by the caller after loading.
ExperimentConfig load_experiment_config(const std::string& path);

/// Construct the configured problem (builtin seeded LASSO, explicit H/q
/// files, or the condensed MPC instance) and attach the high-accuracy
/// reference optimum.
CompositeProblem build_problem(const ExperimentConfig& config);

/// The fixed 20-dimensional seeded LASSO used by `builtin-test`.
CompositeProblem builtin_lasso();

/// Assemble bound parameters from the configuration, problem and (optionally)
/// a finished run: dist0 from the reference optimum, variance proxies derived
/// from the error models, every field overridable under [bounds].
BoundParams assemble_bound_params(const ExperimentConfig& config,
                                  const CompositeProblem& problem,
                                  const IterateTrace* trace);

/// Execute one subcommand: runs solvers and/or bound evaluations per the
/// configuration and writes CSV artifacts. Returns the process exit status
/// (0 success; validate-errors returns 1 when a statistical check fails).
/// ConfigError/NumericalError escape to the caller for exit-code mapping.
int run_experiment(const ExperimentConfig& config, RunMode mode);

}  // namespace axprox
