#pragma once

#include <optional>

#include "axprox/core.hpp"

namespace axprox {

/// Tail of Bernstein's inequality for a sum of independent zero-mean bounded
/// terms: min(1, 2·exp(−t² / (2·Σσᵢ² + (2/3)·M·t))).
double bernstein_tail(double t, double M, double sigma_sq_sum);

struct AdmmBoundParams {
  double eps_g0 = 0.0;    // a.s. bound on the x-block prox error
  double mean_eps_g = 0.0;
  Matrix M_x;             // x-block proximal weight (enters both D and the
                          // initial-distance terms)
  double dist0_x = 0.0;   // ‖x⁰−x★‖₂
  double dist0_z = 0.0;   // ‖z⁰−z★‖₂
};

/// Every scalar entering the convergence-bound evaluators. The sigma_* fields
/// hold *variances* (sup over iterations), matching the σ² symbols they feed.
struct BoundParams {
  double gamma = 1.0;      // concentration parameter γ > 0
  double delta = 0.0;      // gradient error scale δ
  double eps0 = 0.0;       // a.s. prox error bound ε₀
  double mean_eps_h = 0.0;  // E[ε_h]
  double sigma_eps_h = 0.0;  // sup Var(ε_h)
  double sigma_eps_g = 0.0;  // sup Var(ε_gᵀ(x★−x^{i+1}))
  double sigma_r = 0.0;      // sup Var((1/s)·rᵀ(x★−x^{i+1}))
  double s = 1.0;          // stepsize
  Eigen::Index n = 1;      // problem dimension
  double dist0 = 0.0;      // ‖x★−x⁰‖₂
  double M_grad = 1.0;     // 1 (absolute mode) or sup‖∇g(x^i)‖∞ (relative)
  double p = 1.0;          // per-iteration non-expansion probability
  double alpha_bar = 0.0;  // ᾱ = max α_i; 0 → use α_k from the schedule
  double lipschitz_L = 0.0;  // used by prior bounds; 0 → 1/s
  double d_x = 1.0;  // prior-work constant D_x (definition external), default 1
  double m_u = 1.0;  // prior-work constant M_u (accelerated case), default 1
  std::optional<AdmmBoundParams> admm;

  void validate() const;
};

/// Validity thresholds on k for each concentration term: the asymptotic forms
/// are justified for k ≫ threshold, the nonasymptotic ones for k ≪ threshold.
/// A zero variance makes the corresponding term exact and its threshold +inf.
struct RegimeThresholds {
  double asym_eps_h = 0.0;
  double asym_eps_g = 0.0;
  double asym_r = 0.0;
  double nonasym_eps_h = 0.0;
  double nonasym_eps_g = 0.0;
  double nonasym_r = 0.0;
};

struct PgdBoundValues {
  double asymptotic = 0.0;
  double nonasymptotic = 0.0;
  double combined = 0.0;  // pointwise min of the two closed forms
  RegimeThresholds thresholds;
};

struct ApgdBoundValues {
  double asymptotic = 0.0;
  double nonasymptotic = 0.0;
  double combined = 0.0;
  RegimeThresholds thresholds;
  double alpha_k = 1.0;  // momentum weight entering the 1/α_k² prefactor
};

struct AdmmBoundValues {
  double asymptotic = 0.0;
  double nonasymptotic = 0.0;
  double combined = 0.0;
};

/// Bounds on f(x^{k+1})−f★ for the inexact proximal-gradient scheme,
///   (1/k)·[S_{ε_h} + S_r + S_{ε_g} + dist0²/(2s)],
/// with the concentration terms in their asymptotic (√k) and nonasymptotic
/// (bounded-increment) closed forms; expectations of the error–iterate cross
/// terms are zero under the error models, so only the ε_h mean survives.
PgdBoundValues axpgd_bounds(long k, const BoundParams& params);

/// Accelerated analogue with the 1/α_k² prefactor and Σi, Σi² weightings.
ApgdBoundValues axapgd_bounds(long k, const BoundParams& params);

/// Ergodic bound for the weighted splitting scheme; requires params.admm.
/// The initial-distance term uses λ_max(M_x)·dist0_x² as the M_x-weighted
/// squared distance (exact when M_x = 0 or a multiple of the identity).
AdmmBoundValues admm_bounds(long k, const BoundParams& params);

enum class PriorBound { schmidt_basic, schmidt_accel, hamadouche_basic };

/// Deterministic and earlier probabilistic comparison bounds, evaluated with
/// worst-case per-iteration errors (‖ε_g‖₂ = √n·δ·M_grad, ε_h = ε₀).
double prior_bounds(long k, const BoundParams& params, PriorBound which);

enum class Regime { asymptotic, nonasymptotic };

/// Probability that the k-step bound of the chosen regime holds:
/// max(0, p^k·(1−4e^{−γ²/2})) asymptotic, max(0, p^k·(1−4e^{−γ/2}))
/// nonasymptotic.
double probability_floor(double gamma, double p, long k, Regime regime);

/// True when the floor is clamped to 0 for every k (γ below the regime's
/// critical value, √(2·ln4) resp. 2·ln4), i.e. the stated probability is
/// vacuous and the bound curve carries no formal guarantee.
bool probability_floor_vacuous(double gamma, Regime regime);

}  // namespace axprox
