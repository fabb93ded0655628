#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "axprox/cli.hpp"
#include "axprox/core.hpp"
#include "axprox/mpc.hpp"

using namespace axprox;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() /
                       ("axprox_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path log = scratch / "cli_output.txt";
  const std::string cmd = std::string("\"") + AXPROX_CLI_PATH + "\" " + args +
                          " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = read_file(log);
  return r;
}

const char* kHeader =
    "k,f_value,subopt,bound_thm_asym,bound_thm_nonasym,bound_combined,"
    "bound_prior,prob_floor_asym,prob_floor_nonasym";

}  // namespace

TEST_CASE("configuration parser handles sections comments and overrides") {
  const std::string text =
      "top = 1\n"
      "[solver]\r\n"
      "kind = axpgd\n"
      "# a full-line comment\n"
      "  ; another full-line comment\n"
      "iters = 10 # trailing comment\n"
      "iters = 25 ; later occurrences win\n"
      "path = a#b\n"
      "\n"
      "[errors]\n"
      "grad_bound = 2.5\n";
  ConfigMap cfg = ConfigMap::parse_string(text, "inline.cfg");

  CHECK(cfg.get_long("top") == 1);
  CHECK(cfg.get_string("solver.kind") == "axpgd");
  CHECK(cfg.get_long("solver.iters") == 25);
  // '#' only starts a trailing comment after whitespace.
  CHECK(cfg.get_string("solver.path") == "a#b");
  CHECK(cfg.get_double("errors.grad_bound") == doctest::Approx(2.5));
  CHECK(cfg.has("solver.kind"));
  CHECK_FALSE(cfg.has("solver.missing"));
  CHECK(cfg.get_string("solver.missing", "fallback") == "fallback");
  CHECK(cfg.get_double("solver.missing", 7.0) == doctest::Approx(7.0));
  CHECK(cfg.get_long("solver.missing", -3) == -3);
}

TEST_CASE("configuration parser reports the file and line of an error") {
  try {
    (void)ConfigMap::parse_string("ok = 1\nnot a key value line\n",
                                  "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS((void)ConfigMap::parse_string("[unterminated\n", "x"),
                  ConfigError);
  CHECK_THROWS_AS((void)ConfigMap::parse_string("[]\n", "x"), ConfigError);
  CHECK_THROWS_AS((void)ConfigMap::parse_string("= 3\n", "x"), ConfigError);
  CHECK_THROWS_AS((void)ConfigMap::parse_file("/nonexistent/file.cfg"),
                  ConfigError);
}

TEST_CASE("typed getters parse values and name the offending key") {
  ConfigMap cfg = ConfigMap::parse_string(
      "num = 2.5\nint = -4\nuns = 18\nbadnum = abc\nlist = 1, 2.5 3\n"
      "seeds = 4 5,6\n",
      "typed.cfg");
  CHECK(cfg.get_double("num") == doctest::Approx(2.5));
  CHECK(cfg.get_long("int") == -4);
  CHECK(cfg.get_u64("uns") == 18);
  const std::vector<double> list = cfg.get_double_list("list");
  REQUIRE(list.size() == 3);
  CHECK(list[0] == doctest::Approx(1.0));
  CHECK(list[1] == doctest::Approx(2.5));
  CHECK(list[2] == doctest::Approx(3.0));
  const std::vector<std::uint64_t> seeds = cfg.get_u64_list("seeds");
  REQUIRE(seeds.size() == 3);
  CHECK(seeds[0] == 4);
  CHECK(seeds[2] == 6);

  try {
    (void)cfg.get_double("badnum");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("badnum") != std::string::npos);
  }
  CHECK_THROWS_AS((void)cfg.get_long("num"), ConfigError);   // 2.5 not integer
  CHECK_THROWS_AS((void)cfg.get_u64("int"), ConfigError);    // negative
  CHECK_THROWS_AS((void)cfg.get_string("missing"), ConfigError);
}

TEST_CASE("experiment configuration defaults and validation") {
  const fs::path dir = make_temp_dir("cfg");

  write_file(dir / "empty.cfg", "");
  ExperimentConfig def = load_experiment_config((dir / "empty.cfg").string());
  CHECK(def.source == ProblemSource::builtin_test);
  CHECK(def.solver == SolverKind::axpgd);
  CHECK(def.solver_config.momentum == Momentum::none);
  CHECK(def.solver_config.stepsize_s == doctest::Approx(0.0));
  CHECK(def.solver_config.max_iter == 1000);
  REQUIRE(def.seeds.size() == 1);
  CHECK(def.seeds[0] == 0);
  CHECK(def.out_dir == ".");
  CHECK(def.prior == PriorBound::hamadouche_basic);
  CHECK_FALSE(def.solver_config.error_g.has_value());
  CHECK_FALSE(def.solver_config.error_h.has_value());

  write_file(dir / "full.cfg",
             "[solver]\nkind = axapgd\nstepsize = 0.25\niters = 42\n"
             "[errors]\ngrad_bound = 2\ngrad_sigma = 0.3\ngrad_mode = "
             "relative\nprox_eps0 = 1\nprox_mean = 0.25\nprox_sigma = 0.1\n"
             "[run]\nseeds = 3 5 7\nout_dir = /tmp/somewhere\n"
             "[bounds]\nprior = schmidt_accel\n");
  ExperimentConfig full = load_experiment_config((dir / "full.cfg").string());
  CHECK(full.solver == SolverKind::axapgd);
  CHECK(full.solver_config.momentum == Momentum::fista);
  CHECK(full.solver_config.stepsize_s == doctest::Approx(0.25));
  CHECK(full.solver_config.max_iter == 42);
  REQUIRE(full.seeds.size() == 3);
  CHECK(full.seeds[1] == 5);
  CHECK(full.out_dir == "/tmp/somewhere");
  CHECK(full.prior == PriorBound::schmidt_accel);
  REQUIRE(full.solver_config.error_g.has_value());
  CHECK(full.solver_config.error_g->bound_M == doctest::Approx(2.0));
  CHECK(full.solver_config.error_g->mode == GradientErrorMode::relative);
  REQUIRE(full.solver_config.error_h.has_value());
  CHECK(full.solver_config.error_h->eps0 == doctest::Approx(1.0));
  CHECK(full.solver_config.error_h->mean == doctest::Approx(0.25));

  write_file(dir / "seedrange.cfg", "[run]\nseed_base = 10\nseed_count = 4\n");
  ExperimentConfig sr =
      load_experiment_config((dir / "seedrange.cfg").string());
  REQUIRE(sr.seeds.size() == 4);
  CHECK(sr.seeds.front() == 10);
  CHECK(sr.seeds.back() == 13);

  write_file(dir / "badsource.cfg", "[problem]\nsource = nonsense\n");
  CHECK_THROWS_AS(
      (void)load_experiment_config((dir / "badsource.cfg").string()),
      ConfigError);
  write_file(dir / "badkind.cfg", "[solver]\nkind = newton\n");
  CHECK_THROWS_AS((void)load_experiment_config((dir / "badkind.cfg").string()),
                  ConfigError);
  write_file(dir / "badprior.cfg", "[bounds]\nprior = unknown\n");
  CHECK_THROWS_AS(
      (void)load_experiment_config((dir / "badprior.cfg").string()),
      ConfigError);
  write_file(dir / "badstep.cfg", "[solver]\nstepsize = -0.5\n");
  CHECK_THROWS_AS((void)load_experiment_config((dir / "badstep.cfg").string()),
                  ConfigError);
  write_file(dir / "badmode.cfg", "[errors]\ngrad_bound = 1\ngrad_mode = x\n");
  CHECK_THROWS_AS((void)load_experiment_config((dir / "badmode.cfg").string()),
                  ConfigError);
  write_file(dir / "missingmpc.cfg",
             "[problem]\nsource = mpc-spec\n[mpc]\na_file = nope.txt\n"
             "b_file = nope.txt\nc_file = nope.txt\nsampling_period = 0.1\n"
             "np = 2\nnc = 1\n");
  CHECK_THROWS_AS(
      (void)load_experiment_config((dir / "missingmpc.cfg").string()),
      ConfigError);

  // The splitting solver takes prox errors on both blocks, never a gradient
  // error model.
  write_file(dir / "admmgrad.cfg",
             "[solver]\nkind = axwlmadmm\n[errors]\ngrad_bound = 1\n");
  try {
    (void)load_experiment_config((dir / "admmgrad.cfg").string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("gprox") != std::string::npos);
  }

  fs::remove_all(dir);
}

TEST_CASE("shipped tracking experiment configuration loads") {
  const fs::path cfg = fs::path(AXPROX_DATA_DIR) / "tracking.cfg";
  ExperimentConfig config = load_experiment_config(cfg.string());
  CHECK(config.source == ProblemSource::mpc_spec);
  CHECK(config.solver == SolverKind::axpgd);
  CHECK(config.solver_config.max_iter == 5000);
  CHECK(config.seeds.size() == 20);
  REQUIRE(config.solver_config.error_g.has_value());
  CHECK(config.solver_config.error_g->bound_M == doctest::Approx(22.0));
  REQUIRE(config.solver_config.error_h.has_value());
  CHECK(config.solver_config.error_h->eps0 == doctest::Approx(10.0));
  CHECK(config.raw.get_double("bounds.gamma") == doctest::Approx(0.05));

  CompositeProblem problem = build_problem(config);
  CHECK(problem.dim == 16);
  CHECK(problem.lipschitz_L > 0.0);
  REQUIRE(problem.reference_opt.has_value());
  CHECK(std::isfinite(problem.reference_opt->f_star));
}

TEST_CASE("builtin problem is deterministic and self consistent") {
  CompositeProblem a = builtin_lasso();
  CompositeProblem b = builtin_lasso();
  REQUIRE(a.dim == 20);
  CHECK(a.lipschitz_L > 0.0);
  CHECK(a.lipschitz_L == b.lipschitz_L);  // bitwise deterministic

  Vector x = Vector::Zero(20);
  for (Eigen::Index i = 0; i < 20; ++i) x(i) = std::sin(1.0 + 0.7 * i);
  CHECK(a.eval_g(x) == b.eval_g(x));  // bitwise deterministic construction
  CHECK((a.grad_g(x) - b.grad_g(x)).cwiseAbs().maxCoeff() == 0.0);

  // finite_diff_gradient(problem, ...) differentiates the smooth part only.
  const Vector numeric = finite_diff_gradient(a, x, 1e-5);
  const Vector analytic = a.grad_g(x);
  CHECK((analytic - numeric).norm() / std::max(1.0, analytic.norm()) <= 1e-6);
}

TEST_CASE("bound parameter assembly derives fields from problem and models") {
  const fs::path dir = make_temp_dir("assemble");
  write_file(dir / "exp.cfg",
             "[errors]\ngrad_bound = 1.5\ngrad_sigma = 0.2\n"
             "prox_eps0 = 2\nprox_mean = 0.5\nprox_sigma = 0.3\n"
             "[bounds]\ngamma = 2.5\np = 0.9\n");
  ExperimentConfig config = load_experiment_config((dir / "exp.cfg").string());
  CompositeProblem problem = build_problem(config);
  REQUIRE(problem.reference_opt.has_value());
  const double d0 = problem.reference_opt->x_star.norm();
  const double s = 1.0 / problem.lipschitz_L;

  BoundParams P = assemble_bound_params(config, problem, nullptr);
  CHECK(P.gamma == doctest::Approx(2.5));
  CHECK(P.p == doctest::Approx(0.9));
  CHECK(P.s == doctest::Approx(s).epsilon(1e-15));
  CHECK(P.n == problem.dim);
  CHECK(P.lipschitz_L == doctest::Approx(problem.lipschitz_L));
  CHECK(P.dist0 == doctest::Approx(d0).epsilon(1e-15));
  CHECK(P.delta == doctest::Approx(1.5));
  CHECK(P.M_grad == doctest::Approx(1.0));  // absolute mode
  CHECK(P.eps0 == doctest::Approx(2.0));
  CHECK(P.mean_eps_h == doctest::Approx(0.5));
  CHECK(P.sigma_eps_h == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(P.sigma_eps_g == doctest::Approx(0.04 * d0 * d0).epsilon(1e-12));
  CHECK(P.sigma_r ==
        doctest::Approx(2.0 * 0.5 * d0 * d0 / (s * 20.0)).epsilon(1e-12));
  CHECK_FALSE(P.admm.has_value());

  // Relative gradient mode pulls the measured gradient sup from the trace.
  write_file(dir / "rel.cfg",
             "[solver]\nstepsize = 0.01\n"
             "[errors]\ngrad_bound = 0.1\ngrad_sigma = 0.02\n"
             "grad_mode = relative\n");
  ExperimentConfig rel = load_experiment_config((dir / "rel.cfg").string());
  IterateTrace trace;
  trace.grad_sup_inf_norm = 7.5;
  BoundParams Pr = assemble_bound_params(rel, problem, &trace);
  CHECK(Pr.M_grad == doctest::Approx(7.5));
  CHECK(Pr.sigma_eps_g ==
        doctest::Approx(0.02 * 7.5 * 0.02 * 7.5 * d0 * d0).epsilon(1e-12));

  // Explicit [bounds] overrides replace any derived value.
  write_file(dir / "ovr.cfg",
             "[bounds]\ngamma = 3\ndist0 = 2\nsigma_eps_g = 0.5\n"
             "sigma_r = 0.25\neps0 = 1\nmean_eps_h = 0.75\nsigma_eps_h = "
             "0.1\nd_x = 4\nm_u = 2\nalpha_bar = 6\n");
  ExperimentConfig ovr = load_experiment_config((dir / "ovr.cfg").string());
  BoundParams Po = assemble_bound_params(ovr, problem, nullptr);
  CHECK(Po.gamma == doctest::Approx(3.0));
  CHECK(Po.dist0 == doctest::Approx(2.0));
  CHECK(Po.sigma_eps_g == doctest::Approx(0.5));
  CHECK(Po.sigma_r == doctest::Approx(0.25));
  CHECK(Po.eps0 == doctest::Approx(1.0));
  CHECK(Po.mean_eps_h == doctest::Approx(0.75));
  CHECK(Po.sigma_eps_h == doctest::Approx(0.1));
  CHECK(Po.d_x == doctest::Approx(4.0));
  CHECK(Po.m_u == doctest::Approx(2.0));
  CHECK(Po.alpha_bar == doctest::Approx(6.0));

  // The splitting solver gets its block parameters from errors.gprox_*.
  write_file(dir / "admm.cfg",
             "[solver]\nkind = axwlmadmm\n"
             "[errors]\ngprox_eps0 = 2\ngprox_mean = 0.5\ngprox_sigma = 0.35\n"
             "prox_eps0 = 1\nprox_mean = 0.25\n"
             "[bounds]\ndist0_z = 3\n");
  ExperimentConfig admm = load_experiment_config((dir / "admm.cfg").string());
  BoundParams Pa = assemble_bound_params(admm, problem, nullptr);
  REQUIRE(Pa.admm.has_value());
  CHECK(Pa.admm->eps_g0 == doctest::Approx(2.0));
  CHECK(Pa.admm->mean_eps_g == doctest::Approx(0.5));
  CHECK(Pa.sigma_eps_g == doctest::Approx(0.35 * 0.35).epsilon(1e-14));
  CHECK(Pa.admm->M_x.rows() == problem.dim);
  CHECK(Pa.admm->M_x.cwiseAbs().maxCoeff() == 0.0);
  CHECK(Pa.admm->dist0_x == doctest::Approx(d0).epsilon(1e-15));
  CHECK(Pa.admm->dist0_z == doctest::Approx(3.0));

  fs::remove_all(dir);
}

TEST_CASE("solve subcommand writes trace CSVs with the documented schema") {
  const fs::path dir = make_temp_dir("solve");
  write_file(dir / "exp.cfg", "[solver]\niters = 50\n[run]\nout_dir = " +
                                  (dir / "out").string() + "\n");

  CliResult r = run_cli("solve --config \"" + (dir / "exp.cfg").string() +
                            "\"",
                        dir);
  CHECK(r.exit_code == 0);

  const fs::path run_csv = dir / "out" / "run_0.csv";
  REQUIRE(fs::exists(run_csv));
  const std::vector<std::string> lines = read_lines(run_csv);
  REQUIRE(lines.size() == 51);  // header + one row per iteration
  CHECK(lines[0] == kHeader);

  double prev_f = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split_csv(lines[i]);
    REQUIRE(f.size() == 9);
    CHECK(f[0] == std::to_string(i));
    const double fv = std::strtod(f[1].c_str(), nullptr);
    CHECK(fv <= prev_f + 1e-12 * std::max(1.0, std::abs(prev_f)));
    prev_f = fv;
    CHECK(!f[2].empty());  // suboptimality known: reference is attached
    const double subopt = std::strtod(f[2].c_str(), nullptr);
    CHECK(subopt >= -1e-10);
    for (int j = 3; j < 9; ++j) CHECK(f[j].empty());  // no bounds in solve
  }

  const fs::path summary = dir / "out" / "summary.csv";
  REQUIRE(fs::exists(summary));
  const std::vector<std::string> sl = read_lines(summary);
  REQUIRE(sl.size() == 2);
  const std::vector<std::string> srow = split_csv(sl[1]);
  REQUIRE(srow.size() >= 4);
  CHECK(srow[0] == "0");
  CHECK(srow[1] == "50");

  // Reruns are byte-identical; --seed switches the output name.
  CliResult r2 = run_cli("solve --config \"" + (dir / "exp.cfg").string() +
                             "\" --out \"" + (dir / "out2").string() + "\"",
                         dir);
  CHECK(r2.exit_code == 0);
  CHECK(read_file(run_csv) == read_file(dir / "out2" / "run_0.csv"));

  CliResult r3 = run_cli("solve --config \"" + (dir / "exp.cfg").string() +
                             "\" --seed 7 --iters 5 --out \"" +
                             (dir / "out3").string() + "\"",
                         dir);
  CHECK(r3.exit_code == 0);
  CHECK(fs::exists(dir / "out3" / "run_7.csv"));
  CHECK_FALSE(fs::exists(dir / "out3" / "run_0.csv"));
  CHECK(read_lines(dir / "out3" / "run_7.csv").size() == 6);

  fs::remove_all(dir);
}

TEST_CASE("bounds subcommand evaluates the error free rate curve") {
  const fs::path dir = make_temp_dir("bounds");
  write_file(dir / "exp.cfg", "[solver]\niters = 20\n[run]\nout_dir = " +
                                  (dir / "out").string() + "\n");
  CliResult r = run_cli("bounds --config \"" + (dir / "exp.cfg").string() +
                            "\"",
                        dir);
  CHECK(r.exit_code == 0);

  const fs::path csv = dir / "out" / "bounds.csv";
  REQUIRE(fs::exists(csv));
  const std::vector<std::string> lines = read_lines(csv);
  REQUIRE(lines.size() == 21);
  CHECK(lines[0] == kHeader);

  // With no error models the bound curve must equal dist0^2/(2sk); the
  // builtin problem supplies dist0 and s = 1/L deterministically.
  ExperimentConfig config =
      load_experiment_config((dir / "exp.cfg").string());
  CompositeProblem problem = build_problem(config);
  const double d0 = problem.reference_opt->x_star.norm();
  const double L = problem.lipschitz_L;

  for (size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split_csv(lines[i]);
    REQUIRE(f.size() == 9);
    CHECK(f[1].empty());  // no solver run: f_value and subopt are absent
    CHECK(f[2].empty());
    const double k = static_cast<double>(i);
    const double exact = L * d0 * d0 / (2.0 * k);
    const double asym = std::strtod(f[3].c_str(), nullptr);
    const double nonasym = std::strtod(f[4].c_str(), nullptr);
    const double combined = std::strtod(f[5].c_str(), nullptr);
    const double prior = std::strtod(f[6].c_str(), nullptr);
    CHECK(asym == doctest::Approx(exact).epsilon(1e-12));
    CHECK(nonasym == doctest::Approx(exact).epsilon(1e-12));
    CHECK(combined == doctest::Approx(exact).epsilon(1e-12));
    // hamadouche_basic with zero errors and d_x = 1 collapses to the same
    // curve.
    CHECK(prior == doctest::Approx(exact).epsilon(1e-12));
    const double pf_asym = std::strtod(f[7].c_str(), nullptr);
    const double pf_nonasym = std::strtod(f[8].c_str(), nullptr);
    CHECK(pf_asym >= 0.0);
    CHECK(pf_asym <= 1.0);
    CHECK(pf_nonasym >= 0.0);
    CHECK(pf_nonasym <= 1.0);
  }
  fs::remove_all(dir);
}

TEST_CASE("compare subcommand populates trace and bound columns together") {
  const fs::path dir = make_temp_dir("compare");
  write_file(dir / "exp.cfg",
             "[solver]\niters = 30\n"
             "[errors]\ngrad_bound = 0.5\ngrad_sigma = 0.1\n"
             "prox_eps0 = 0.2\nprox_mean = 0.05\nprox_sigma = 0.02\n"
             "[bounds]\ngamma = 2\np = 0.99\n"
             "[run]\nout_dir = " +
                 (dir / "out").string() + "\n");
  CliResult r = run_cli("compare --config \"" + (dir / "exp.cfg").string() +
                            "\"",
                        dir);
  CHECK(r.exit_code == 0);

  const std::vector<std::string> lines =
      read_lines(dir / "out" / "run_0.csv");
  REQUIRE(lines.size() == 31);
  CHECK(lines[0] == kHeader);
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split_csv(lines[i]);
    REQUIRE(f.size() == 9);
    for (int j = 0; j < 9; ++j) CHECK(!f[j].empty());
    const double asym = std::strtod(f[3].c_str(), nullptr);
    const double nonasym = std::strtod(f[4].c_str(), nullptr);
    const double combined = std::strtod(f[5].c_str(), nullptr);
    CHECK(combined == doctest::Approx(std::min(asym, nonasym)));
    const double pf_asym = std::strtod(f[7].c_str(), nullptr);
    CHECK(pf_asym >= 0.0);
    CHECK(pf_asym <= 1.0);
  }
  fs::remove_all(dir);
}

TEST_CASE("mpc build subcommand writes the condensed problem files") {
  const fs::path dir = make_temp_dir("mpcbuild");
  const fs::path cfg = fs::path(AXPROX_DATA_DIR) / "tracking.cfg";
  CliResult r = run_cli("mpc-build --config \"" + cfg.string() +
                            "\" --out \"" + (dir / "out").string() + "\"",
                        dir);
  CHECK(r.exit_code == 0);

  const Matrix H = read_matrix((dir / "out" / "H.txt").string());
  const Vector q = read_vector((dir / "out" / "q.txt").string());
  const Matrix lam = read_matrix((dir / "out" / "lambda.txt").string());
  const Matrix F = read_matrix((dir / "out" / "F.txt").string());
  const Matrix Phi = read_matrix((dir / "out" / "Phi.txt").string());

  REQUIRE(H.rows() == 16);
  REQUIRE(H.cols() == 16);
  REQUIRE(q.size() == 16);
  REQUIRE(lam.rows() == 1);
  CHECK(lam(0, 0) == doctest::Approx(1.0));
  REQUIRE(F.rows() == 60);   // Np * outputs
  REQUIRE(F.cols() == 10);   // augmented dimension n + q
  REQUIRE(Phi.rows() == 60);
  REQUIRE(Phi.cols() == 16);  // Nc * inputs

  // Rebuild the same condensation directly from the shipped model files.
  const fs::path data(AXPROX_DATA_DIR);
  MpcSpec spec;
  spec.ss.A = read_matrix((data / "spacecraft" / "A.txt").string());
  spec.ss.B = read_matrix((data / "spacecraft" / "B.txt").string());
  spec.ss.C = read_matrix((data / "spacecraft" / "C.txt").string());
  spec.ss.h = 0.1;
  spec.Np = 20;
  spec.Nc = 4;
  spec.Q = 100.0 * Matrix::Identity(3, 3);
  spec.R = 5.0 * Matrix::Identity(4, 4);
  spec.lambda_l1 = 1.0;
  spec.Rs = Vector::Zero(3);
  spec.x_current = read_vector((data / "spacecraft" / "x0.txt").string());
  CondensedLasso direct = condense(spec);

  CHECK((H - direct.g.H).cwiseAbs().maxCoeff() <=
        1e-12 * direct.g.H.cwiseAbs().maxCoeff());
  CHECK((q - direct.g.q).cwiseAbs().maxCoeff() <=
        1e-12 * std::max(1.0, direct.g.q.cwiseAbs().maxCoeff()));
  CHECK((F - direct.F).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((Phi - direct.Phi).cwiseAbs().maxCoeff() <= 1e-12);

  // mpc-build demands an MPC problem source.
  write_file(dir / "builtin.cfg", "");
  CliResult bad = run_cli("mpc-build --config \"" +
                              (dir / "builtin.cfg").string() + "\" --out \"" +
                              (dir / "out2").string() + "\"",
                          dir);
  CHECK(bad.exit_code == 1);

  fs::remove_all(dir);
}

TEST_CASE("validate errors subcommand reports model compliance") {
  const fs::path dir = make_temp_dir("validate");
  write_file(dir / "exp.cfg",
             "[errors]\ngrad_bound = 22\ngrad_sigma = 1.2535663341006878\n"
             "grad_extreme_prob = 0.002\nprox_eps0 = 10\nprox_mean = 1\n"
             "prox_sigma = 0.7071067811865476\n");
  CliResult r = run_cli("validate-errors --config \"" +
                            (dir / "exp.cfg").string() + "\"",
                        dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("gradient error model") != std::string::npos);
  CHECK(r.output.find("prox error model") != std::string::npos);

  write_file(dir / "none.cfg", "[run]\nsamples = 40000\n");
  CliResult none = run_cli("validate-errors --config \"" +
                               (dir / "none.cfg").string() + "\"",
                           dir);
  CHECK(none.exit_code == 1);

  write_file(dir / "few.cfg",
             "[errors]\nprox_eps0 = 1\n[run]\nsamples = 100\n");
  CliResult few = run_cli("validate-errors --config \"" +
                              (dir / "few.cfg").string() + "\"",
                          dir);
  CHECK(few.exit_code == 1);

  fs::remove_all(dir);
}

TEST_CASE("process exit codes distinguish usage config and numerical errors") {
  const fs::path dir = make_temp_dir("exitcodes");

  CliResult usage = run_cli("", dir);
  CHECK(usage.exit_code == 1);  // missing subcommand

  CliResult missing =
      run_cli("solve --config /nonexistent/path.cfg", dir);
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("configuration error") != std::string::npos);

  write_file(dir / "badkind.cfg", "[solver]\nkind = simplex\n");
  CliResult badkind = run_cli("solve --config \"" +
                                  (dir / "badkind.cfg").string() + "\"",
                              dir);
  CHECK(badkind.exit_code == 1);

  // A structurally valid MPC problem whose condensed Hessian is singular
  // (no input authority, no input weight) fails numerically: exit 2.
  write_file(dir / "A.txt", "1 1\n0\n");
  write_file(dir / "B.txt", "1 1\n0\n");
  write_file(dir / "C.txt", "1 1\n1\n");
  write_file(dir / "sing.cfg",
             "[problem]\nsource = mpc-spec\n"
             "[mpc]\na_file = A.txt\nb_file = B.txt\nc_file = C.txt\n"
             "sampling_period = 1\nnp = 2\nnc = 1\nq_weight = 1\n"
             "r_weight = 0\n"
             "[run]\nout_dir = " +
                 (dir / "out").string() + "\n");
  CliResult sing = run_cli("mpc-build --config \"" +
                               (dir / "sing.cfg").string() + "\" --out \"" +
                               (dir / "out").string() + "\"",
                           dir);
  CHECK(sing.exit_code == 2);
  CHECK(sing.output.find("numerical error") != std::string::npos);

  fs::remove_all(dir);
}
