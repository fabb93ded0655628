#include "axprox/cli.hpp"

#include "axprox/errors.hpp"
#include "axprox/prox.hpp"

#include <Eigen/Cholesky>

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

namespace axprox {

namespace {

namespace fs = std::filesystem;

// Distinct stream for the prox-error model when one seed drives both models.
constexpr std::uint64_t kProxSeedSalt = 0x9E3779B97F4A7C15ULL;

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strips comments: a line whose first non-blank char is '#' or ';', or a
// trailing comment introduced by whitespace followed by '#' or ';'.
std::string strip_comment(const std::string& line) {
  const std::string t = trim(line);
  if (!t.empty() && (t[0] == '#' || t[0] == ';')) return "";
  for (size_t i = 1; i < line.size(); ++i)
    if ((line[i] == '#' || line[i] == ';') &&
        std::isspace(static_cast<unsigned char>(line[i - 1])))
      return line.substr(0, i - 1);
  return line;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// CSV cell: finite value in full precision, empty when absent (NaN).
std::string cell(double v) { return std::isnan(v) ? std::string() : fmt17(v); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------------------
// ConfigMap

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

ConfigMap ConfigMap::parse_string(const std::string& text,
                                  const std::string& origin) {
  ConfigMap out;
  out.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::string where =
        origin + ":" + std::to_string(lineno);
    if (body.front() == '[') {
      require(body.back() == ']', "config: unterminated section header at " +
                                      where);
      section = trim(body.substr(1, body.size() - 2));
      require(!section.empty(), "config: empty section name at " + where);
      continue;
    }
    const size_t eq = body.find('=');
    require(eq != std::string::npos,
            "config: expected 'key = value' at " + where);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    require(!key.empty(), "config: empty key at " + where);
    const std::string full = section.empty() ? key : section + "." + key;
    out.values_[full] = value;  // later occurrences win
  }
  return out;
}

bool ConfigMap::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string ConfigMap::get_string(const std::string& key) const {
  auto it = values_.find(key);
  require(it != values_.end(),
          "config: missing key '" + key + "' (" + origin_ + ")");
  return it->second;
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

namespace {

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (!t.empty()) {
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() + t.size() && std::isfinite(v)) return v;
  }
  throw ConfigError("config: key '" + key + "' is not a finite number: '" +
                    text + "'");
}

long parse_long(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (!t.empty()) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end == t.c_str() + t.size() && errno == 0) return v;
  }
  throw ConfigError("config: key '" + key + "' is not an integer: '" + text +
                    "'");
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (!t.empty() && t[0] != '-') {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end == t.c_str() + t.size() && errno == 0)
      return static_cast<std::uint64_t>(v);
  }
  throw ConfigError("config: key '" + key +
                    "' is not an unsigned integer: '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) items.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) items.push_back(cur);
  return items;
}

}  // namespace

double ConfigMap::get_double(const std::string& key) const {
  return parse_double(get_string(key), key);
}
double ConfigMap::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
long ConfigMap::get_long(const std::string& key) const {
  return parse_long(get_string(key), key);
}
long ConfigMap::get_long(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}
std::uint64_t ConfigMap::get_u64(const std::string& key) const {
  return parse_u64(get_string(key), key);
}
std::uint64_t ConfigMap::get_u64(const std::string& key,
                                 std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}
std::vector<double> ConfigMap::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : split_list(get_string(key)))
    out.push_back(parse_double(item, key));
  return out;
}
std::vector<std::uint64_t> ConfigMap::get_u64_list(
    const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const std::string& item : split_list(get_string(key)))
    out.push_back(parse_u64(item, key));
  return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration

namespace {

std::string resolve_path(const ExperimentConfig& config,
                         const std::string& file) {
  fs::path p(file);
  if (p.is_absolute() || config.base_dir.empty()) return file;
  return (fs::path(config.base_dir) / p).string();
}

std::optional<GradientErrorModel> grad_model_from(const ConfigMap& raw) {
  if (!raw.has("errors.grad_bound")) return std::nullopt;
  GradientErrorModel m;
  m.bound_M = raw.get_double("errors.grad_bound");
  m.sigma = raw.get_double("errors.grad_sigma", 0.0);
  const std::string mode = raw.get_string("errors.grad_mode", "absolute");
  if (mode == "absolute")
    m.mode = GradientErrorMode::absolute;
  else if (mode == "relative")
    m.mode = GradientErrorMode::relative;
  else
    throw ConfigError(
        "config: errors.grad_mode must be 'absolute' or 'relative', got '" +
        mode + "'");
  m.extreme_prob = raw.get_double("errors.grad_extreme_prob", 0.0);
  m.validate();
  return m;
}

std::optional<ProxErrorModel> prox_model_from(const ConfigMap& raw,
                                              const std::string& prefix) {
  if (!raw.has(prefix + "_eps0")) return std::nullopt;
  ProxErrorModel m;
  m.eps0 = raw.get_double(prefix + "_eps0");
  m.sigma = raw.get_double(prefix + "_sigma", 0.0);
  m.mean = raw.get_double(prefix + "_mean", 0.0);
  m.validate();
  return m;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig config;
  config.raw = ConfigMap::parse_file(path);
  config.base_dir = fs::path(path).parent_path().string();
  const ConfigMap& raw = config.raw;

  const std::string source =
      raw.get_string("problem.source", "builtin-test");
  if (source == "builtin-test")
    config.source = ProblemSource::builtin_test;
  else if (source == "lasso-file")
    config.source = ProblemSource::lasso_file;
  else if (source == "mpc-spec")
    config.source = ProblemSource::mpc_spec;
  else
    throw ConfigError("config: problem.source must be one of builtin-test, "
                      "lasso-file, mpc-spec; got '" + source + "'");

  const std::string kind = raw.get_string("solver.kind", "axpgd");
  if (kind == "axpgd")
    config.solver = SolverKind::axpgd;
  else if (kind == "axapgd")
    config.solver = SolverKind::axapgd;
  else if (kind == "axwlmadmm")
    config.solver = SolverKind::axwlmadmm;
  else
    throw ConfigError("config: solver.kind must be one of axpgd, axapgd, "
                      "axwlmadmm; got '" + kind + "'");
  config.solver_config.momentum =
      config.solver == SolverKind::axapgd ? Momentum::fista : Momentum::none;

  const std::string step = raw.get_string("solver.stepsize", "auto");
  if (step == "auto") {
    config.solver_config.stepsize_s = 0.0;
  } else {
    config.solver_config.stepsize_s = parse_double(step, "solver.stepsize");
    require(config.solver_config.stepsize_s > 0.0,
            "config: solver.stepsize must be positive or 'auto'");
  }
  config.solver_config.max_iter = raw.get_long("solver.iters", 1000);
  require(config.solver_config.max_iter >= 0,
          "config: solver.iters must be nonnegative");

  config.solver_config.error_g = grad_model_from(raw);
  config.solver_config.error_h = prox_model_from(raw, "errors.prox");
  if (config.solver == SolverKind::axwlmadmm)
    require(!config.solver_config.error_g,
            "config: axwlmadmm takes no gradient error model; use "
            "errors.gprox_* for the x-block prox error");

  if (raw.has("run.seeds")) {
    config.seeds = raw.get_u64_list("run.seeds");
  } else {
    const std::uint64_t base = raw.get_u64("run.seed_base", 0);
    const std::uint64_t count = raw.get_u64("run.seed_count", 1);
    for (std::uint64_t i = 0; i < count; ++i)
      config.seeds.push_back(base + i);
  }
  require(!config.seeds.empty(), "config: seed list must be nonempty");

  config.out_dir = raw.get_string("run.out_dir", ".");

  const std::string prior =
      raw.get_string("bounds.prior", "hamadouche_basic");
  if (prior == "schmidt_basic")
    config.prior = PriorBound::schmidt_basic;
  else if (prior == "schmidt_accel")
    config.prior = PriorBound::schmidt_accel;
  else if (prior == "hamadouche_basic")
    config.prior = PriorBound::hamadouche_basic;
  else
    throw ConfigError("config: bounds.prior must be one of schmidt_basic, "
                      "schmidt_accel, hamadouche_basic; got '" + prior + "'");

  // Problem files must exist up front so failures surface before any run.
  if (config.source == ProblemSource::lasso_file) {
    for (const char* key : {"lasso.h_file", "lasso.q_file"}) {
      const std::string file = resolve_path(config, raw.get_string(key));
      require(fs::exists(file),
              std::string("config: ") + key + " file not found: " + file);
    }
  } else if (config.source == ProblemSource::mpc_spec) {
    for (const char* key : {"mpc.a_file", "mpc.b_file", "mpc.c_file"}) {
      const std::string file = resolve_path(config, raw.get_string(key));
      require(fs::exists(file),
              std::string("config: ") + key + " file not found: " + file);
    }
  }
  return config;
}

// ---------------------------------------------------------------------------
// Problems

namespace {

CompositeProblem quadratic_lasso_problem(std::shared_ptr<QuadraticForm> quad,
                                         double lambda_l1) {
  CompositeProblem p;
  p.dim = quad->dim();
  p.grad_g = [quad](const Vector& x) { return quad->gradient(x); };
  p.eval_g = [quad](const Vector& x) { return quad->value(x); };
  p.eval_h = [lambda_l1](const Vector& x) {
    return lambda_l1 * x.lpNorm<1>();
  };
  p.prox_h = [lambda_l1](const Vector& v, double step) {
    return soft_threshold(v, lambda_l1 * step);
  };
  p.lipschitz_L = 2.0 * max_eigenvalue(quad->H);
  return p;
}

// The composite problem plus the pieces the splitting solver and the MPC
// artifact writer need in their raw quadratic form.
struct BuiltData {
  CompositeProblem problem;
  std::shared_ptr<QuadraticForm> quad;
  double lambda_l1 = 0.0;
};

BuiltData builtin_lasso_data() {
  const Eigen::Index n = 20;
  RngStream rng(42);
  Matrix G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = rng.normal();
  Matrix H = G.transpose() * G / static_cast<double>(n) +
             0.5 * Matrix::Identity(n, n);
  H = 0.5 * (H + H.transpose()).eval();

  Vector x_target = Vector::Zero(n);
  x_target(0) = 3.0;
  x_target(4) = -2.0;
  x_target(9) = 1.5;
  x_target(14) = -1.0;
  const Vector q = H * x_target;
  const double c = q.dot(Eigen::LLT<Matrix>(H).solve(q));

  BuiltData data;
  data.quad = std::make_shared<QuadraticForm>(QuadraticForm{H, q, c});
  data.lambda_l1 = 0.5;
  data.problem = quadratic_lasso_problem(data.quad, data.lambda_l1);
  return data;
}

BuiltData lasso_file_data(const ExperimentConfig& config) {
  const ConfigMap& raw = config.raw;
  const Matrix H =
      read_matrix(resolve_path(config, raw.get_string("lasso.h_file")));
  const Vector q =
      read_vector(resolve_path(config, raw.get_string("lasso.q_file")));
  require(H.rows() == H.cols() && H.rows() >= 1,
          "config: lasso.h_file must hold a square matrix");
  require(q.size() == H.rows(),
          "config: lasso.q_file dimension does not match lasso.h_file");
  BuiltData data;
  data.quad = std::make_shared<QuadraticForm>(
      QuadraticForm{0.5 * (H + H.transpose()), q,
                    raw.get_double("lasso.constant", 0.0)});
  data.lambda_l1 = raw.get_double("lasso.lambda_l1", 0.0);
  require(data.lambda_l1 >= 0.0,
          "config: lasso.lambda_l1 must be nonnegative");
  data.problem = quadratic_lasso_problem(data.quad, data.lambda_l1);
  return data;
}

MpcSpec mpc_spec_from(const ExperimentConfig& config) {
  const ConfigMap& raw = config.raw;
  MpcSpec spec;
  spec.ss.A = read_matrix(resolve_path(config, raw.get_string("mpc.a_file")));
  spec.ss.B = read_matrix(resolve_path(config, raw.get_string("mpc.b_file")));
  spec.ss.C = read_matrix(resolve_path(config, raw.get_string("mpc.c_file")));
  if (raw.has("mpc.d_file"))
    spec.ss.D =
        read_matrix(resolve_path(config, raw.get_string("mpc.d_file")));
  spec.ss.h = raw.get_double("mpc.sampling_period");
  spec.Np = static_cast<int>(raw.get_long("mpc.np"));
  spec.Nc = static_cast<int>(raw.get_long("mpc.nc"));
  const Eigen::Index n = spec.ss.A.rows();
  const Eigen::Index m = spec.ss.B.cols();
  const Eigen::Index q = spec.ss.C.rows();

  if (raw.has("mpc.q_file"))
    spec.Q = read_matrix(resolve_path(config, raw.get_string("mpc.q_file")));
  else
    spec.Q = raw.get_double("mpc.q_weight", 1.0) * Matrix::Identity(q, q);
  if (raw.has("mpc.r_file"))
    spec.R = read_matrix(resolve_path(config, raw.get_string("mpc.r_file")));
  else
    spec.R = raw.get_double("mpc.r_weight", 0.1) * Matrix::Identity(m, m);
  spec.lambda_l1 = raw.get_double("mpc.lambda_l1", 0.0);

  spec.Rs = Vector::Zero(q);
  if (raw.has("mpc.rs")) {
    const std::vector<double> rs = raw.get_double_list("mpc.rs");
    if (rs.size() == 1) {
      spec.Rs.setConstant(rs[0]);
    } else {
      require(static_cast<Eigen::Index>(rs.size()) == q,
              "config: mpc.rs must have 1 or q entries");
      for (Eigen::Index i = 0; i < q; ++i) spec.Rs(i) = rs[i];
    }
  }
  if (raw.has("mpc.x_current_file"))
    spec.x_current = read_vector(
        resolve_path(config, raw.get_string("mpc.x_current_file")));
  else
    spec.x_current = Vector::Zero(n + q);
  return spec;
}

BuiltData mpc_data(const ExperimentConfig& config) {
  const CondensedLasso cl = condense(mpc_spec_from(config));
  BuiltData data;
  data.quad = std::make_shared<QuadraticForm>(cl.g);
  data.lambda_l1 = cl.lambda_l1;
  data.problem = quadratic_lasso_problem(data.quad, data.lambda_l1);
  return data;
}

BuiltData build_data(const ExperimentConfig& config) {
  BuiltData data;
  switch (config.source) {
    case ProblemSource::builtin_test:
      data = builtin_lasso_data();
      break;
    case ProblemSource::lasso_file:
      data = lasso_file_data(config);
      break;
    case ProblemSource::mpc_spec:
      data = mpc_data(config);
      break;
  }
  attach_reference(data.problem);
  return data;
}

double resolve_stepsize(const ExperimentConfig& config,
                        const CompositeProblem& problem) {
  if (config.solver_config.stepsize_s > 0.0)
    return config.solver_config.stepsize_s;
  const double L = problem.lipschitz_L;
  require(L > 0.0,
          "config: solver.stepsize=auto needs a problem with lipschitz_L > 0");
  const auto& eg = config.solver_config.error_g;
  if (eg && eg->mode == GradientErrorMode::relative)
    return 1.0 / (L + eg->bound_M);
  return 1.0 / L;
}

}  // namespace

CompositeProblem builtin_lasso() { return builtin_lasso_data().problem; }

CompositeProblem build_problem(const ExperimentConfig& config) {
  return build_data(config).problem;
}

BoundParams assemble_bound_params(const ExperimentConfig& config,
                                  const CompositeProblem& problem,
                                  const IterateTrace* trace) {
  const ConfigMap& raw = config.raw;
  BoundParams P;
  P.gamma = raw.get_double("bounds.gamma", 1.0);
  P.p = raw.get_double("bounds.p", 1.0);
  P.s = resolve_stepsize(config, problem);
  P.n = problem.dim;
  P.lipschitz_L = problem.lipschitz_L;
  P.dist0 = problem.reference_opt ? problem.reference_opt->x_star.norm() : 0.0;

  const auto& eg = config.solver_config.error_g;
  const auto& eh = config.solver_config.error_h;
  double entry_sigma = 0.0;  // per-entry std dev of the gradient error
  if (eg) {
    P.delta = eg->bound_M;
    if (eg->mode == GradientErrorMode::relative) {
      P.M_grad = trace ? trace->grad_sup_inf_norm : 1.0;
      entry_sigma = eg->sigma * P.M_grad;
    } else {
      P.M_grad = 1.0;
      entry_sigma = eg->sigma;
    }
  }
  if (eh) {
    P.eps0 = eh->eps0;
    P.mean_eps_h = eh->mean;
    P.sigma_eps_h = eh->sigma * eh->sigma;
  }

  // Overridable variance proxies for the cross-term increments (see module
  // docs): Var(ε_gᵀd) = σ_entry²·‖d‖², Var((1/s)rᵀd) = 2·E[ε_h]·‖d‖²/(s·n),
  // both evaluated at the worst-case distance ‖d‖ = dist0.
  P.sigma_eps_g = entry_sigma * entry_sigma * P.dist0 * P.dist0;
  P.sigma_r = 2.0 * P.mean_eps_h * P.dist0 * P.dist0 /
              (P.s * static_cast<double>(P.n));

  P.gamma = raw.get_double("bounds.gamma", P.gamma);
  P.delta = raw.get_double("bounds.delta", P.delta);
  P.eps0 = raw.get_double("bounds.eps0", P.eps0);
  P.mean_eps_h = raw.get_double("bounds.mean_eps_h", P.mean_eps_h);
  P.sigma_eps_h = raw.get_double("bounds.sigma_eps_h", P.sigma_eps_h);
  P.sigma_eps_g = raw.get_double("bounds.sigma_eps_g", P.sigma_eps_g);
  P.sigma_r = raw.get_double("bounds.sigma_r", P.sigma_r);
  P.dist0 = raw.get_double("bounds.dist0", P.dist0);
  P.M_grad = raw.get_double("bounds.m_grad", P.M_grad);
  P.alpha_bar = raw.get_double("bounds.alpha_bar", P.alpha_bar);
  P.d_x = raw.get_double("bounds.d_x", P.d_x);
  P.m_u = raw.get_double("bounds.m_u", P.m_u);

  if (config.solver == SolverKind::axwlmadmm) {
    AdmmBoundParams A;
    const auto egp = prox_model_from(raw, "errors.gprox");
    if (egp) {
      A.eps_g0 = egp->eps0;
      A.mean_eps_g = egp->mean;
      // The splitting bound's σ²_{ε_g} is the x-block prox error variance.
      P.sigma_eps_g = egp->sigma * egp->sigma;
      P.sigma_eps_g = raw.get_double("bounds.sigma_eps_g", P.sigma_eps_g);
    }
    A.M_x = Matrix::Zero(problem.dim, problem.dim);  // CLI default M_x = 0
    A.dist0_x = raw.get_double("bounds.dist0_x", P.dist0);
    A.dist0_z = raw.get_double("bounds.dist0_z", P.dist0);
    A.eps_g0 = raw.get_double("bounds.eps_g0", A.eps_g0);
    A.mean_eps_g = raw.get_double("bounds.mean_eps_g", A.mean_eps_g);
    P.admm = std::move(A);
  }

  P.validate();
  return P;
}

// ---------------------------------------------------------------------------
// run_experiment

namespace {

constexpr const char* kCsvHeader =
    "k,f_value,subopt,bound_thm_asym,bound_thm_nonasym,bound_combined,"
    "bound_prior,prob_floor_asym,prob_floor_nonasym";

struct BoundColumns {
  double asym = kNaN;
  double nonasym = kNaN;
  double combined = kNaN;
  double prior = kNaN;
  double pf_asym = kNaN;
  double pf_nonasym = kNaN;
};

BoundColumns eval_bound_columns(long k, const ExperimentConfig& config,
                                const BoundParams& P) {
  BoundColumns col;
  switch (config.solver) {
    case SolverKind::axpgd: {
      const PgdBoundValues b = axpgd_bounds(k, P);
      col.asym = b.asymptotic;
      col.nonasym = b.nonasymptotic;
      col.combined = b.combined;
      break;
    }
    case SolverKind::axapgd: {
      const ApgdBoundValues b = axapgd_bounds(k, P);
      col.asym = b.asymptotic;
      col.nonasym = b.nonasymptotic;
      col.combined = b.combined;
      break;
    }
    case SolverKind::axwlmadmm: {
      const AdmmBoundValues b = admm_bounds(k, P);
      col.asym = b.asymptotic;
      col.nonasym = b.nonasymptotic;
      col.combined = b.combined;
      break;
    }
  }
  col.prior = prior_bounds(k, P, config.prior);
  col.pf_asym = probability_floor(P.gamma, P.p, k, Regime::asymptotic);
  col.pf_nonasym = probability_floor(P.gamma, P.p, k, Regime::nonasymptotic);
  return col;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' endings on all platforms
  if (!out)
    throw ConfigError("cannot open output file '" + path.string() + "'");
  return out;
}

void write_row(std::ofstream& out, long k, double f, double subopt,
               const BoundColumns* col) {
  out << k << ',' << cell(f) << ',' << cell(subopt) << ',';
  if (col)
    out << cell(col->asym) << ',' << cell(col->nonasym) << ','
        << cell(col->combined) << ',' << cell(col->prior) << ','
        << cell(col->pf_asym) << ',' << cell(col->pf_nonasym);
  else
    out << ",,,,,";
  out << '\n';
}

IterateTrace run_one(const ExperimentConfig& config, const BuiltData& data,
                     std::uint64_t seed, double stepsize) {
  SolverConfig sc = config.solver_config;
  sc.stepsize_s = stepsize;
  if (sc.error_g) sc.error_g->seed = seed;
  if (sc.error_h) sc.error_h->seed = seed ^ kProxSeedSalt;

  switch (config.solver) {
    case SolverKind::axpgd:
      return ax_pgd(data.problem, sc);
    case SolverKind::axapgd:
      return ax_apgd(data.problem, sc);
    case SolverKind::axwlmadmm: {
      const Eigen::Index n = data.problem.dim;
      const ConfigMap& raw = config.raw;
      AdmmSpec spec;
      spec.A = Matrix::Identity(n, n);
      spec.B = -Matrix::Identity(n, n);
      spec.c = Vector::Zero(n);
      spec.lambda_dual = raw.get_double("admm.lambda", 1.0);
      spec.L_weight = Matrix::Identity(n, n);
      spec.M_x = Matrix::Zero(n, n);
      spec.M_z = Matrix::Identity(n, n);
      spec.lambda_x = raw.get_double("admm.lambda_x", 1.0);
      spec.lambda_z = raw.get_double("admm.lambda_z", 1.0);

      std::optional<ProxErrorModel> error_g_prox =
          prox_model_from(raw, "errors.gprox");
      if (error_g_prox) error_g_prox->seed = seed;

      const L1Prox h_fun(data.lambda_l1);
      std::optional<double> f_star;
      if (data.problem.reference_opt)
        f_star = data.problem.reference_opt->f_star;
      return ax_wlm_admm(*data.quad, h_fun, spec, sc, error_g_prox,
                         std::nullopt, std::nullopt, std::nullopt, f_star);
    }
  }
  throw ConfigError("run_experiment: unknown solver kind");
}

int run_solver_modes(const ExperimentConfig& config, RunMode mode) {
  const BuiltData data = build_data(config);
  const double stepsize = resolve_stepsize(config, data.problem);
  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);

  std::ofstream summary = open_csv(out_dir / "summary.csv");
  summary << "seed,rows,final_f,final_subopt,final_bound_combined,"
             "final_bound_prior\n";

  if (mode == RunMode::bounds) {
    const BoundParams P = assemble_bound_params(config, data.problem, nullptr);
    std::ofstream out = open_csv(out_dir / "bounds.csv");
    out << kCsvHeader << '\n';
    BoundColumns last;
    for (long k = 1; k <= config.solver_config.max_iter; ++k) {
      last = eval_bound_columns(k, config, P);
      write_row(out, k, kNaN, kNaN, &last);
    }
    summary << ",," << cell(kNaN) << ',' << cell(kNaN) << ','
            << cell(last.combined) << ',' << cell(last.prior) << '\n';
    return 0;
  }

  for (std::uint64_t seed : config.seeds) {
    const IterateTrace trace = run_one(config, data, seed, stepsize);
    std::optional<BoundParams> P;
    if (mode == RunMode::compare)
      P = assemble_bound_params(config, data.problem, &trace);

    std::ofstream out =
        open_csv(out_dir / ("run_" + std::to_string(seed) + ".csv"));
    out << kCsvHeader << '\n';
    BoundColumns last;
    for (size_t i = 1; i < trace.records.size(); ++i) {
      const TraceRecord& rec = trace.records[i];
      if (P) {
        last = eval_bound_columns(rec.k, config, *P);
        write_row(out, rec.k, rec.f_value, rec.suboptimality, &last);
      } else {
        write_row(out, rec.k, rec.f_value, rec.suboptimality, nullptr);
      }
    }
    const TraceRecord& fin = trace.records.back();
    summary << seed << ',' << (trace.records.size() - 1) << ','
            << cell(fin.f_value) << ',' << cell(fin.suboptimality) << ','
            << cell(P ? last.combined : kNaN) << ','
            << cell(P ? last.prior : kNaN) << '\n';
  }
  return 0;
}

int run_validate_errors(const ExperimentConfig& config) {
  const auto grad = grad_model_from(config.raw);
  auto prox = prox_model_from(config.raw, "errors.prox");
  require(grad.has_value() || prox.has_value(),
          "validate-errors: no error model configured under [errors]");
  const long target = config.raw.get_long("run.samples", 1000000);
  require(target >= 10000, "validate-errors: run.samples must be >= 10000");
  const Eigen::Index dim =
      static_cast<Eigen::Index>(config.raw.get_long("run.dim", 20));
  require(dim >= 1, "validate-errors: run.dim must be positive");

  bool all_pass = true;
  if (grad) {
    GradientErrorModel model = *grad;
    model.seed = config.seeds.front();
    const GradientErrorSampler sampler(model);
    RngStream stream(model.seed);
    const long nvec = (target + dim - 1) / dim;
    std::vector<Vector> samples;
    samples.reserve(nvec);
    for (long i = 0; i < nvec; ++i)
      samples.push_back(sampler.sample(dim, stream));
    const StreamReport report = validate_error_stream(samples, model);
    std::cout << "gradient error model (" << nvec * dim << " samples)\n"
              << report.to_string();
    all_pass = all_pass && report.all_pass();
  }
  if (prox) {
    prox->seed = config.seeds.front() ^ kProxSeedSalt;
    RngStream stream(prox->seed);
    std::vector<double> samples;
    samples.reserve(target);
    for (long i = 0; i < target; ++i)
      samples.push_back(sample_prox_error(*prox, stream));
    const StreamReport report = validate_error_stream(samples, *prox);
    std::cout << "prox error model (" << target << " samples)\n"
              << report.to_string();
    all_pass = all_pass && report.all_pass();
  }
  return all_pass ? 0 : 1;
}

int run_mpc_build(const ExperimentConfig& config) {
  require(config.source == ProblemSource::mpc_spec,
          "mpc-build: problem.source must be mpc-spec");
  const CondensedLasso cl = condense(mpc_spec_from(config));
  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);
  write_matrix((out_dir / "H.txt").string(), cl.g.H);
  write_vector((out_dir / "q.txt").string(), cl.g.q);
  Matrix lam(1, 1);
  lam(0, 0) = cl.lambda_l1;
  write_matrix((out_dir / "lambda.txt").string(), lam);
  write_matrix((out_dir / "F.txt").string(), cl.F);
  write_matrix((out_dir / "Phi.txt").string(), cl.Phi);
  std::cout << "condensed problem written to " << out_dir.string() << " ("
            << cl.g.dim() << " variables)\n";
  return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, RunMode mode) {
  switch (mode) {
    case RunMode::solve:
    case RunMode::bounds:
    case RunMode::compare:
      return run_solver_modes(config, mode);
    case RunMode::validate_errors:
      return run_validate_errors(config);
    case RunMode::mpc_build:
      return run_mpc_build(config);
  }
  throw ConfigError("run_experiment: unknown mode");
}

}  // namespace axprox
