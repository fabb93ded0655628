#include "axprox/bounds.hpp"

#include "axprox/solvers.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace axprox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_finite(double v, const char* name) {
  require(std::isfinite(v), std::string("bounds: ") + name + " must be finite");
}

// Validity threshold k* = gamma^pow * M^2 / (9 sigma^2) shared by every
// concentration term; a zero variance makes the term exact (+inf threshold).
double regime_threshold(double gamma_pow, double M, double sigma_sq) {
  if (sigma_sq <= 0.0) return kInf;
  return gamma_pow * M * M / (9.0 * sigma_sq);
}

struct IncrementBounds {
  double Mh = 0.0;  // eps0 - E[eps_h]
  double Mg = 0.0;  // sqrt(n)*|delta|*M_grad*dist0
  double Mr = 0.0;  // sqrt(2*eps0/s)*dist0
};

IncrementBounds increment_bounds(const BoundParams& p) {
  IncrementBounds b;
  b.Mh = p.eps0 - p.mean_eps_h;
  b.Mg = std::sqrt(static_cast<double>(p.n)) * std::abs(p.delta) * p.M_grad *
         p.dist0;
  b.Mr = std::sqrt(2.0 * p.eps0 / p.s) * p.dist0;
  return b;
}

}  // namespace

double bernstein_tail(double t, double M, double sigma_sq_sum) {
  require(t >= 0.0, "bernstein_tail: t must be nonnegative");
  require(M >= 0.0, "bernstein_tail: M must be nonnegative");
  require(sigma_sq_sum >= 0.0,
          "bernstein_tail: sigma_sq_sum must be nonnegative");
  if (t == 0.0) return 1.0;
  const double denom = 2.0 * sigma_sq_sum + (2.0 / 3.0) * M * t;
  if (denom == 0.0) return 0.0;
  return std::min(1.0, 2.0 * std::exp(-t * t / denom));
}

void BoundParams::validate() const {
  require_finite(gamma, "gamma");
  require_finite(delta, "delta");
  require_finite(eps0, "eps0");
  require_finite(mean_eps_h, "mean_eps_h");
  require_finite(sigma_eps_h, "sigma_eps_h");
  require_finite(sigma_eps_g, "sigma_eps_g");
  require_finite(sigma_r, "sigma_r");
  require_finite(s, "s");
  require_finite(dist0, "dist0");
  require_finite(M_grad, "M_grad");
  require_finite(p, "p");
  require_finite(alpha_bar, "alpha_bar");
  require_finite(lipschitz_L, "lipschitz_L");
  require_finite(d_x, "d_x");
  require_finite(m_u, "m_u");
  require(gamma > 0.0, "bounds: gamma must be positive");
  require(s > 0.0, "bounds: stepsize s must be positive");
  require(n >= 1, "bounds: dimension n must be at least 1");
  require(dist0 >= 0.0, "bounds: dist0 must be nonnegative");
  require(eps0 >= 0.0, "bounds: eps0 must be nonnegative");
  require(mean_eps_h >= 0.0 && mean_eps_h <= eps0,
          "bounds: mean_eps_h must lie in [0, eps0]");
  require(sigma_eps_h >= 0.0 && sigma_eps_g >= 0.0 && sigma_r >= 0.0,
          "bounds: variances sigma_eps_h/sigma_eps_g/sigma_r must be "
          "nonnegative");
  require(M_grad >= 0.0, "bounds: M_grad must be nonnegative");
  require(p > 0.0 && p <= 1.0, "bounds: p must lie in (0, 1]");
  require(alpha_bar >= 0.0, "bounds: alpha_bar must be nonnegative");
  require(lipschitz_L >= 0.0, "bounds: lipschitz_L must be nonnegative");
  require(d_x > 0.0, "bounds: d_x must be positive");
  require(m_u > 0.0, "bounds: m_u must be positive");
  if (admm) {
    require_finite(admm->eps_g0, "admm.eps_g0");
    require_finite(admm->mean_eps_g, "admm.mean_eps_g");
    require_finite(admm->dist0_x, "admm.dist0_x");
    require_finite(admm->dist0_z, "admm.dist0_z");
    require(admm->eps_g0 >= 0.0, "bounds: admm.eps_g0 must be nonnegative");
    require(admm->mean_eps_g >= 0.0 && admm->mean_eps_g <= admm->eps_g0,
            "bounds: admm.mean_eps_g must lie in [0, eps_g0]");
    require(admm->M_x.rows() >= 1 && admm->M_x.rows() == admm->M_x.cols(),
            "bounds: admm.M_x must be a nonempty square matrix");
    require(admm->M_x.allFinite(), "bounds: admm.M_x must be finite");
    require(admm->dist0_x >= 0.0 && admm->dist0_z >= 0.0,
            "bounds: admm.dist0_x and admm.dist0_z must be nonnegative");
  }
}

PgdBoundValues axpgd_bounds(long k, const BoundParams& params) {
  params.validate();
  require(k >= 1, "axpgd_bounds: k must be at least 1");
  const double kk = static_cast<double>(k);
  const double E = params.mean_eps_h;
  const double g = params.gamma;
  const IncrementBounds M = increment_bounds(params);
  const double dist_term = params.dist0 * params.dist0 / (2.0 * params.s);

  PgdBoundValues out;
  out.asymptotic =
      (kk * E +
       g * (std::sqrt(kk * params.sigma_eps_h) +
            std::sqrt(kk * params.sigma_eps_g) +
            std::sqrt(kk * params.sigma_r)) +
       dist_term) /
      kk;
  out.nonasymptotic =
      (kk * E + g * (M.Mh + M.Mg + M.Mr) / 3.0 + dist_term) / kk;
  out.combined = std::min(out.asymptotic, out.nonasymptotic);
  const double g2 = g * g;
  out.thresholds.asym_eps_h = regime_threshold(g2, M.Mh, params.sigma_eps_h);
  out.thresholds.asym_eps_g = regime_threshold(g2, M.Mg, params.sigma_eps_g);
  out.thresholds.asym_r = regime_threshold(g2, M.Mr, params.sigma_r);
  out.thresholds.nonasym_eps_h = regime_threshold(g, M.Mh, params.sigma_eps_h);
  out.thresholds.nonasym_eps_g = regime_threshold(g, M.Mg, params.sigma_eps_g);
  out.thresholds.nonasym_r = regime_threshold(g, M.Mr, params.sigma_r);
  return out;
}

ApgdBoundValues axapgd_bounds(long k, const BoundParams& params) {
  params.validate();
  require(k >= 1, "axapgd_bounds: k must be at least 1");
  const double kk = static_cast<double>(k);
  const double sum_i = kk * (kk + 1.0) / 2.0;
  const double sum_i2 = kk * (kk + 1.0) * (2.0 * kk + 1.0) / 6.0;
  const double E = params.mean_eps_h;
  const double g = params.gamma;
  const IncrementBounds M = increment_bounds(params);
  const double dist_term = params.dist0 * params.dist0 / (2.0 * params.s);

  ApgdBoundValues out;
  out.alpha_k = momentum_schedule(k).alpha_k;
  const double pre = 1.0 / (out.alpha_k * out.alpha_k);
  out.asymptotic = pre * (E * sum_i2 +
                          g * (std::sqrt(sum_i2 * params.sigma_eps_h) +
                               std::sqrt(sum_i * params.sigma_eps_g) +
                               std::sqrt(sum_i * params.sigma_r)) +
                          dist_term);
  out.nonasymptotic =
      pre * (E * sum_i2 +
             g * (sum_i2 * M.Mh + sum_i * params.m_u * (M.Mg + M.Mr)) / 3.0 +
             dist_term);
  out.combined = std::min(out.asymptotic, out.nonasymptotic);

  const double abar = params.alpha_bar > 0.0 ? params.alpha_bar : out.alpha_k;
  const double a2 = abar * abar;
  const double a4 = a2 * a2;
  const double g2 = g * g;
  out.thresholds.asym_eps_h =
      regime_threshold(g2 * a4, M.Mh, params.sigma_eps_h);
  out.thresholds.asym_eps_g =
      regime_threshold(g2 * a2, M.Mg, params.sigma_eps_g);
  out.thresholds.asym_r = regime_threshold(g2 * a2, M.Mr, params.sigma_r);
  out.thresholds.nonasym_eps_h =
      regime_threshold(g * a4, M.Mh, params.sigma_eps_h);
  out.thresholds.nonasym_eps_g =
      regime_threshold(g * a2, M.Mg, params.sigma_eps_g);
  out.thresholds.nonasym_r = regime_threshold(g * a2, M.Mr, params.sigma_r);
  return out;
}

AdmmBoundValues admm_bounds(long k, const BoundParams& params) {
  params.validate();
  require(params.admm.has_value(),
          "admm_bounds: params.admm must be set for the splitting bound");
  require(k >= 0, "admm_bounds: k must be nonnegative");
  const AdmmBoundParams& a = *params.admm;
  const double kk = static_cast<double>(k);
  const double g = params.gamma;

  const double lam_Mx = max_eigenvalue(a.M_x);
  require(lam_Mx >= 0.0,
          "admm_bounds: M_x must be positive semidefinite (lambda_max < 0)");
  const Matrix MtM = a.M_x.transpose() * a.M_x;
  const double lam_MtM = std::max(0.0, max_eigenvalue(MtM));

  const double base =
      (lam_Mx * a.dist0_x * a.dist0_x + a.dist0_z * a.dist0_z) /
      (2.0 * (kk + 1.0));
  const double D_rg = std::sqrt(2.0 * lam_MtM * a.eps_g0) * a.dist0_x;
  const double D_rh = std::sqrt(2.0 * params.eps0) * a.dist0_z;

  const double Eg = a.mean_eps_g;
  const double Eh = params.mean_eps_h;
  const double S_g_asym = kk * Eg + g * std::sqrt(kk * params.sigma_eps_g);
  const double S_h_asym = kk * Eh + g * std::sqrt(kk * params.sigma_eps_h);
  const double S_g_nonasym = kk * Eg + g * (a.eps_g0 - Eg) / 3.0;
  const double S_h_nonasym = kk * Eh + g * (params.eps0 - Eh) / 3.0;

  AdmmBoundValues out;
  out.asymptotic = base + (S_g_asym + S_h_asym + D_rg + D_rh) / (kk + 1.0);
  out.nonasymptotic =
      base + (S_g_nonasym + S_h_nonasym + D_rg + D_rh) / (kk + 1.0);
  out.combined = std::min(out.asymptotic, out.nonasymptotic);
  return out;
}

double prior_bounds(long k, const BoundParams& params, PriorBound which) {
  params.validate();
  require(k >= 1, "prior_bounds: k must be at least 1");
  const double kk = static_cast<double>(k);
  const double L = params.lipschitz_L > 0.0 ? params.lipschitz_L : 1.0 / params.s;
  const double eg_norm = std::sqrt(static_cast<double>(params.n)) *
                         std::abs(params.delta) * params.M_grad;
  const double per_iter = eg_norm / L + std::sqrt(2.0 * params.eps0 / L);

  switch (which) {
    case PriorBound::schmidt_basic: {
      const double A = kk * per_iter;
      const double B = kk * params.eps0 / L;
      const double root = params.dist0 + 2.0 * A + std::sqrt(2.0 * B);
      return L / (2.0 * kk) * root * root;
    }
    case PriorBound::schmidt_accel: {
      const double sum_i = kk * (kk + 1.0) / 2.0;
      const double sum_i2 = kk * (kk + 1.0) * (2.0 * kk + 1.0) / 6.0;
      const double A = sum_i * per_iter;
      const double B = sum_i2 * params.eps0 / L;
      const double root = params.dist0 + 2.0 * A + std::sqrt(2.0 * B);
      return 2.0 * L / ((kk + 1.0) * (kk + 1.0)) * root * root;
    }
    case PriorBound::hamadouche_basic: {
      return params.eps0 +
             params.gamma * params.M_grad * params.d_x *
                 std::sqrt(static_cast<double>(params.n) / kk) *
                 std::abs(params.delta) * params.dist0 +
             params.d_x * params.d_x * params.dist0 * params.dist0 /
                 (2.0 * params.s * kk);
    }
  }
  throw ConfigError("prior_bounds: unknown bound selector");
}

double probability_floor(double gamma, double p, long k, Regime regime) {
  require(gamma > 0.0, "probability_floor: gamma must be positive");
  require(p > 0.0 && p <= 1.0, "probability_floor: p must lie in (0, 1]");
  require(k >= 0, "probability_floor: k must be nonnegative");
  const double expo =
      regime == Regime::asymptotic ? gamma * gamma / 2.0 : gamma / 2.0;
  const double floor =
      std::pow(p, static_cast<double>(k)) * (1.0 - 4.0 * std::exp(-expo));
  return std::max(0.0, floor);
}

bool probability_floor_vacuous(double gamma, Regime regime) {
  require(gamma > 0.0, "probability_floor_vacuous: gamma must be positive");
  const double expo =
      regime == Regime::asymptotic ? gamma * gamma / 2.0 : gamma / 2.0;
  return expo <= std::log(4.0);
}

}  // namespace axprox
