#pragma once

#include <optional>

#include "axprox/core.hpp"
#include "axprox/errors.hpp"
#include "axprox/prox.hpp"

namespace axprox {

enum class Momentum { none, fista };

struct SolverConfig {
  double stepsize_s = 0.0;
  long max_iter = 0;
  Momentum momentum = Momentum::none;
  std::optional<GradientErrorModel> error_g;
  std::optional<ProxErrorModel> error_h;
};

struct MomentumStep {
  double alpha_k = 1.0;
  double beta_k = 0.0;
};

/// FISTA extrapolation weights: α₀ = 1, α_k = (1+√(1+4α²_{k−1}))/2,
/// β_k = (α_{k−1}−1)/α_k. α is increasing with α_k ≥ (k+2)/2.
MomentumStep momentum_schedule(long k);

/// Proximal gradient descent with injected errors:
///   x^{k+1} = prox_{sh}(x^k − s(∇g(x^k) + ε_g^k)) + r^k,  ‖r^k‖₂ = √(2s·ε_h^k).
/// With both error models absent (or degenerate) this is exact PGD. The trace
/// records the initial point as k=0 and one record per iteration after it.
/// x0 defaults to the origin.
IterateTrace ax_pgd(const CompositeProblem& problem, const SolverConfig& config,
                    const std::optional<Vector>& x0 = std::nullopt);

/// Accelerated variant: gradient and prox steps are taken at the extrapolated
/// point y^k = x^k + β_k(x^k − x^{k−1}), with x^{−1} = x⁰.
IterateTrace ax_apgd(const CompositeProblem& problem,
                     const SolverConfig& config,
                     const std::optional<Vector>& x0 = std::nullopt);

struct AdmmSpec {
  Matrix A;
  Matrix B;
  Vector c;
  double lambda_dual = 1.0;  // λ = 1/ρ
  Matrix L_weight;           // SPD, fixed across iterations
  Matrix M_x;                // PSD
  Matrix M_z;                // PSD
  double lambda_x = 1.0;
  double lambda_z = 1.0;
};

/// Weighted-Lagrangian generalized-proximal splitting for
///   min g(x) + h(z)  s.t.  Ax + Bz = c.
/// Each iteration solves the two weighted prox subproblems
///   x^{k+1} = argmin (1/λ_x)·g(x) + ½xᵀΛ₁x − xᵀγ₁,
///   z^{k+1} = argmin (1/λ_z)·h(z) + ½zᵀΛ₂z − zᵀγ₂,
/// with Λ₁ = (1/λ)AᵀLA + M_x, γ₁ = M_x x^k − (1/λ)AᵀL(Bz^k − c + v^k),
///      Λ₂ = (1/λ)BᵀLB + M_z, γ₂ = M_z z^k − (1/λ)BᵀL(Ax^{k+1} − c + v^k),
/// then updates the scaled dual v^{k+1} = v^k + Ax^{k+1} + Bz^{k+1} − c using
/// the perturbed iterates. Proximal errors are injected into each block's
/// output as residuals with ‖r‖_Λ = √(2ε) in a random direction:
/// config.error_h perturbs the z-block and error_g_prox the x-block
/// (config.error_g is rejected — there is no gradient step here).
/// The trace records f = g(x)+h(z), the constraint residual ‖Ax+Bz−c‖₂, the
/// x-block error in grad_error_inf_norm and the z-block error in
/// prox_error_eps. f_star, when given, fills the suboptimality column.
IterateTrace ax_wlm_admm(
    const QuadraticForm& g_data, const ProxOp& h_fun, const AdmmSpec& spec,
    const SolverConfig& config,
    const std::optional<ProxErrorModel>& error_g_prox = std::nullopt,
    const std::optional<Vector>& x0 = std::nullopt,
    const std::optional<Vector>& z0 = std::nullopt,
    const std::optional<Vector>& v0 = std::nullopt,
    std::optional<double> f_star = std::nullopt);

/// High-accuracy reference optimum: exact FISTA from x0 until the relative
/// objective change drops below 1e−14 (capped at 10⁶ iterations). The final
/// objective value is an upper bound on the true minimum, so rate checks
/// against it are conservative.
ReferenceOptimum compute_reference(const CompositeProblem& problem,
                                   const std::optional<Vector>& x0 =
                                       std::nullopt);

/// compute_reference + store into problem.reference_opt.
void attach_reference(CompositeProblem& problem,
                      const std::optional<Vector>& x0 = std::nullopt);

}  // namespace axprox
