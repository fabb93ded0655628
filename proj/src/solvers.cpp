#include "axprox/solvers.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <sstream>

namespace axprox {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_problem(const CompositeProblem& p) {
  require(p.dim >= 1, "solver: problem.dim must be positive");
  require(static_cast<bool>(p.grad_g) && static_cast<bool>(p.eval_g) &&
              static_cast<bool>(p.eval_h) && static_cast<bool>(p.prox_h),
          "solver: problem oracles (grad_g/eval_g/eval_h/prox_h) must all be set");
}

double subopt_of(const CompositeProblem& p, double f) {
  return p.reference_opt ? f - p.reference_opt->f_star : kNaN;
}

Vector start_point(const std::optional<Vector>& x0, Eigen::Index dim,
                   const char* who) {
  if (!x0) return Vector::Zero(dim);
  require(x0->size() == dim, std::string(who) + ": x0 has size " +
                                 std::to_string(x0->size()) +
                                 ", expected " + std::to_string(dim));
  return *x0;
}

std::string describe_error_g(const std::optional<GradientErrorModel>& m) {
  if (!m) return "none";
  std::ostringstream out;
  out << "{M=" << m->bound_M << ", sigma=" << m->sigma << ", mode="
      << (m->mode == GradientErrorMode::absolute ? "absolute" : "relative")
      << ", extreme_prob=" << m->extreme_prob << ", seed=" << m->seed << "}";
  return out.str();
}

std::string describe_error_h(const std::optional<ProxErrorModel>& m) {
  if (!m) return "none";
  std::ostringstream out;
  out << "{eps0=" << m->eps0 << ", sigma=" << m->sigma << ", mean=" << m->mean
      << ", seed=" << m->seed << "}";
  return out.str();
}

std::string summarize(const char* name, const SolverConfig& c) {
  std::ostringstream out;
  out << "solver=" << name << " stepsize_s=" << c.stepsize_s
      << " max_iter=" << c.max_iter << " momentum="
      << (c.momentum == Momentum::fista ? "fista" : "none")
      << " error_g=" << describe_error_g(c.error_g)
      << " error_h=" << describe_error_h(c.error_h);
  return out.str();
}

// Shared AxPGD/AxAPGD loop; `accelerated` switches the FISTA extrapolation on.
IterateTrace run_proximal_gradient(const CompositeProblem& problem,
                                   const SolverConfig& config,
                                   const std::optional<Vector>& x0,
                                   bool accelerated, const char* name) {
  check_problem(problem);
  require(config.max_iter >= 0, "solver: max_iter must be nonnegative");
  require(config.stepsize_s > 0.0, "solver: stepsize_s must be positive");
  if (config.error_g) config.error_g->validate();
  if (config.error_h) config.error_h->validate();

  const bool relative = config.error_g &&
                        config.error_g->mode == GradientErrorMode::relative;
  const double L = problem.lipschitz_L;
  require(L >= 0.0, "solver: lipschitz_L must be nonnegative");
  const double limit =
      relative ? 1.0 / (L + config.error_g->bound_M)
               : (L > 0.0 ? 1.0 / L : std::numeric_limits<double>::infinity());
  require(config.stepsize_s <= limit * (1.0 + 1e-9),
          "solver: stepsize_s = " + std::to_string(config.stepsize_s) +
              " violates the admissible limit " + std::to_string(limit) +
              (relative ? " (= 1/(L+delta), relative gradient error)"
                        : " (= 1/L)"));

  std::optional<GradientErrorSampler> g_sampler;
  std::optional<RngStream> g_stream;
  if (config.error_g) {
    g_sampler.emplace(*config.error_g);
    g_stream.emplace(config.error_g->seed);
  }
  std::optional<RngStream> h_stream;
  if (config.error_h) h_stream.emplace(config.error_h->seed);

  const double s = config.stepsize_s;
  IterateTrace trace;
  trace.seed = config.error_g   ? config.error_g->seed
               : config.error_h ? config.error_h->seed
                                : 0;
  trace.config_summary = summarize(name, config);
  trace.records.reserve(static_cast<size_t>(config.max_iter) + 1);

  Vector x = start_point(x0, problem.dim, name);
  Vector x_prev = x;
  {
    const double f0 = eval_objective(problem, x);
    trace.records.push_back({0, f0, subopt_of(problem, f0), 0.0, 0.0, kNaN});
  }

  double m_grad = 0.0;    // running sup of ||grad g||_inf
  double alpha_k = 1.0;   // alpha_0
  for (long k = 0; k < config.max_iter; ++k) {
    double beta = 0.0;
    if (accelerated && k >= 1) {
      const double alpha_next =
          (1.0 + std::sqrt(1.0 + 4.0 * alpha_k * alpha_k)) / 2.0;
      beta = (alpha_k - 1.0) / alpha_next;
      alpha_k = alpha_next;
    }
    const Vector y = (accelerated && beta != 0.0)
                         ? Vector(x + beta * (x - x_prev))
                         : x;

    Vector grad = problem.grad_g(y);
    if (!grad.allFinite())
      throw NumericalError(std::string(name) +
                           ": gradient became non-finite at iteration " +
                           std::to_string(k));
    m_grad = std::max(m_grad, grad.lpNorm<Eigen::Infinity>());

    double grad_err_norm = 0.0;
    if (g_sampler) {
      Vector eps = g_sampler->sample(problem.dim, *g_stream);
      if (relative) eps *= m_grad;
      grad_err_norm = eps.lpNorm<Eigen::Infinity>();
      grad += eps;
    }

    Vector p = problem.prox_h(y - s * grad, s);
    double eps_h = 0.0;
    if (h_stream) {
      eps_h = sample_prox_error(*config.error_h, *h_stream);
      if (eps_h > 0.0) {
        const Vector u = random_unit_vector(problem.dim, *h_stream);
        p += std::sqrt(2.0 * s * eps_h) * u;
      }
    }

    x_prev = x;
    x = p;
    const double f = eval_objective(problem, x);
    if (!std::isfinite(f))
      throw NumericalError(std::string(name) +
                           ": objective became non-finite at iteration " +
                           std::to_string(k + 1));
    trace.records.push_back(
        {k + 1, f, subopt_of(problem, f), grad_err_norm, eps_h, kNaN});
  }

  trace.final_x = x;
  trace.grad_sup_inf_norm = m_grad;
  return trace;
}

}  // namespace

MomentumStep momentum_schedule(long k) {
  require(k >= 0, "momentum_schedule: k must be nonnegative");
  double alpha_prev = 1.0;
  double alpha = 1.0;  // alpha_0
  for (long i = 1; i <= k; ++i) {
    alpha_prev = alpha;
    alpha = (1.0 + std::sqrt(1.0 + 4.0 * alpha_prev * alpha_prev)) / 2.0;
  }
  const double beta = k == 0 ? 0.0 : (alpha_prev - 1.0) / alpha;
  return {alpha, beta};
}

IterateTrace ax_pgd(const CompositeProblem& problem, const SolverConfig& config,
                    const std::optional<Vector>& x0) {
  require(config.momentum == Momentum::none, "ax_pgd: requires momentum=none");
  return run_proximal_gradient(problem, config, x0, false, "axpgd");
}

IterateTrace ax_apgd(const CompositeProblem& problem,
                     const SolverConfig& config,
                     const std::optional<Vector>& x0) {
  require(config.momentum == Momentum::fista,
          "ax_apgd: requires momentum=fista");
  return run_proximal_gradient(problem, config, x0, true, "axapgd");
}

IterateTrace ax_wlm_admm(const QuadraticForm& g_data, const ProxOp& h_fun,
                         const AdmmSpec& spec, const SolverConfig& config,
                         const std::optional<ProxErrorModel>& error_g_prox,
                         const std::optional<Vector>& x0,
                         const std::optional<Vector>& z0,
                         const std::optional<Vector>& v0,
                         std::optional<double> f_star) {
  const Eigen::Index n = spec.A.cols();
  const Eigen::Index m = spec.B.cols();
  const Eigen::Index p = spec.A.rows();
  require(n >= 1 && m >= 1 && p >= 1, "ax_wlm_admm: empty constraint matrices");
  require(spec.B.rows() == p, "ax_wlm_admm: A and B must have equal row counts");
  require(spec.c.size() == p, "ax_wlm_admm: c has size " +
                                  std::to_string(spec.c.size()) +
                                  ", expected " + std::to_string(p));
  require(spec.L_weight.rows() == p && spec.L_weight.cols() == p,
          "ax_wlm_admm: L_weight must be " + std::to_string(p) + "x" +
              std::to_string(p));
  require(spec.M_x.rows() == n && spec.M_x.cols() == n,
          "ax_wlm_admm: M_x must be " + std::to_string(n) + "x" +
              std::to_string(n));
  require(spec.M_z.rows() == m && spec.M_z.cols() == m,
          "ax_wlm_admm: M_z must be " + std::to_string(m) + "x" +
              std::to_string(m));
  require(spec.lambda_dual > 0.0, "ax_wlm_admm: lambda_dual must be positive");
  require(spec.lambda_x > 0.0 && spec.lambda_z > 0.0,
          "ax_wlm_admm: lambda_x and lambda_z must be positive");
  require(g_data.H.rows() == n, "ax_wlm_admm: g_data dimension " +
                                    std::to_string(g_data.H.rows()) +
                                    " does not match A's column count " +
                                    std::to_string(n));
  require(config.max_iter >= 0, "ax_wlm_admm: max_iter must be nonnegative");
  require(!config.error_g,
          "ax_wlm_admm: a gradient error model does not apply (both blocks "
          "take prox steps); use the x-block prox error model instead");
  if (config.error_h) config.error_h->validate();
  if (error_g_prox) error_g_prox->validate();

  const double lam = spec.lambda_dual;
  const Matrix AtL = spec.A.transpose() * spec.L_weight;
  const Matrix BtL = spec.B.transpose() * spec.L_weight;
  Matrix Lambda1 = AtL * spec.A / lam + spec.M_x;
  Matrix Lambda2 = BtL * spec.B / lam + spec.M_z;
  Lambda1 = 0.5 * (Lambda1 + Lambda1.transpose()).eval();
  Lambda2 = 0.5 * (Lambda2 + Lambda2.transpose()).eval();
  if (Eigen::LLT<Matrix>(Lambda1).info() != Eigen::Success)
    throw ConfigError(
        "ax_wlm_admm: Lambda1 = (1/lambda)A^T L A + M_x is not positive "
        "definite");
  if (Eigen::LLT<Matrix>(Lambda2).info() != Eigen::Success)
    throw ConfigError(
        "ax_wlm_admm: Lambda2 = (1/lambda)B^T L B + M_z is not positive "
        "definite");

  std::optional<RngStream> h_stream, g_stream;
  if (config.error_h) h_stream.emplace(config.error_h->seed);
  if (error_g_prox) g_stream.emplace(error_g_prox->seed);

  // eps-suboptimal block update: exact weighted prox plus a residual on the
  // sphere ||r||_Lambda = sqrt(2*eps), the ball characterization under the
  // block's quadratic geometry (for Lambda = I/s this is ||r||_2 = sqrt(2*s*eps)).
  const auto lambda_residual = [](double eps, const Matrix& Lambda,
                                  RngStream& stream) {
    Vector u = random_unit_vector(Lambda.rows(), stream);
    const double un = std::sqrt(u.dot(Lambda * u));
    return Vector(std::sqrt(2.0 * eps) / un * u);
  };

  IterateTrace trace;
  trace.seed = config.error_h ? config.error_h->seed
               : error_g_prox ? error_g_prox->seed
                              : 0;
  trace.config_summary =
      summarize("axwlmadmm", config) +
      " error_g_prox=" + describe_error_h(error_g_prox) +
      " lambda_dual=" + std::to_string(lam);
  trace.records.reserve(static_cast<size_t>(config.max_iter) + 1);

  Vector x = start_point(x0, n, "ax_wlm_admm (x0)");
  Vector z = start_point(z0, m, "ax_wlm_admm (z0)");
  Vector v = start_point(v0, p, "ax_wlm_admm (v0)");

  const auto objective = [&](const Vector& xv, const Vector& zv) {
    return g_data.value(xv) + h_fun.eval(zv);
  };
  const auto record = [&](long k, double eps_g, double eps_h) {
    const double f = objective(x, z);
    if (std::isnan(f))
      throw NumericalError("ax_wlm_admm: objective became NaN at iteration " +
                           std::to_string(k));
    const double resid = (spec.A * x + spec.B * z - spec.c).norm();
    trace.records.push_back({k, f, f_star ? f - *f_star : kNaN, eps_g, eps_h,
                             resid});
  };
  record(0, 0.0, 0.0);

  for (long k = 0; k < config.max_iter; ++k) {
    double eps_g = 0.0, eps_h = 0.0;

    const Vector gamma1 = spec.M_x * x - AtL * (spec.B * z - spec.c + v) / lam;
    x = weighted_prox({Lambda1, gamma1, 1.0 / spec.lambda_x}, g_data);
    if (g_stream) {
      eps_g = sample_prox_error(*error_g_prox, *g_stream);
      if (eps_g > 0.0) x += lambda_residual(eps_g, Lambda1, *g_stream);
    }

    const Vector gamma2 = spec.M_z * z - BtL * (spec.A * x - spec.c + v) / lam;
    z = weighted_prox({Lambda2, gamma2, 1.0 / spec.lambda_z}, h_fun);
    if (h_stream) {
      eps_h = sample_prox_error(*config.error_h, *h_stream);
      if (eps_h > 0.0) z += lambda_residual(eps_h, Lambda2, *h_stream);
    }

    v += spec.A * x + spec.B * z - spec.c;
    record(k + 1, eps_g, eps_h);
  }

  trace.final_x = x;
  trace.final_z = z;
  return trace;
}

ReferenceOptimum compute_reference(const CompositeProblem& problem,
                                   const std::optional<Vector>& x0) {
  check_problem(problem);
  const double L = problem.lipschitz_L;
  const double s = L > 0.0 ? 1.0 / L : 1.0;

  Vector x = start_point(x0, problem.dim, "compute_reference");
  Vector x_prev = x;
  double f = eval_objective(problem, x);
  Vector x_best = x;
  double f_best = f;

  double alpha = 1.0;
  int quiet = 0;  // consecutive iterations with negligible change
  for (long k = 0; k < 1000000; ++k) {
    double beta = 0.0;
    if (k >= 1) {
      const double alpha_next = (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha)) / 2.0;
      beta = (alpha - 1.0) / alpha_next;
      alpha = alpha_next;
    }
    const Vector y = beta != 0.0 ? Vector(x + beta * (x - x_prev)) : x;
    x_prev = x;
    x = problem.prox_h(y - s * problem.grad_g(y), s);
    const double f_next = eval_objective(problem, x);
    if (!std::isfinite(f_next))
      throw NumericalError("compute_reference: objective became non-finite");
    if (f_next < f_best) {
      f_best = f_next;
      x_best = x;
    }
    const double change = std::abs(f_next - f);
    f = f_next;
    quiet = change <= 1e-14 * std::max(1.0, std::abs(f)) ? quiet + 1 : 0;
    if (quiet >= 5) break;
  }
  return {x_best, f_best};
}

void attach_reference(CompositeProblem& problem,
                      const std::optional<Vector>& x0) {
  problem.reference_opt = compute_reference(problem, x0);
}

}  // namespace axprox
