#pragma once

#include <utility>

#include "axprox/core.hpp"

namespace axprox {

/// Continuous-time linear system ẋ = Ax + Bu, y = Cx + Du, sampled with
/// period h.
struct StateSpace {
  Matrix A;  // n×n
  Matrix B;  // n×m
  Matrix C;  // q×n
  Matrix D;  // q×m (retained for completeness; unused by the condensation)
  double h = 0.0;

  void validate() const;
};

/// Zero-order-hold discretization: A_d = e^{Ah}, B_d = ∫₀ʰ e^{At}B dt,
/// both read off the matrix exponential of the block matrix [[A,B],[0,0]]·h.
std::pair<Matrix, Matrix> zoh_discretize(const StateSpace& ss);

struct AugmentedSystem {
  Matrix A_a;  // [[A_d, 0], [C·A_d, I]]
  Matrix B_a;  // [[B_d], [C·B_d]]
  Matrix C_a;  // [0, I]
};

/// Incremental (velocity-form) augmentation: the state becomes [Δx; y].
AugmentedSystem augment(const Matrix& A_d, const Matrix& B_d, const Matrix& C);

struct PredictionMatrices {
  Matrix F;    // stacks C_a·A_a^i, i = 1..Np
  Matrix Phi;  // lower block-Toeplitz, block (i,j) = C_a·A_a^{i−j}·B_a, Nc
               // block-columns
};

/// Horizon prediction: Y = F·X₀ + Phi·ΔU over Np steps with Nc free moves.
PredictionMatrices prediction_matrices(const Matrix& A_a, const Matrix& B_a,
                                       const Matrix& C_a, int Np, int Nc);

struct MpcSpec {
  StateSpace ss;
  int Np = 0;        // prediction horizon
  int Nc = 0;        // control horizon, Nc ≤ Np
  Matrix Q;          // per-step output weight, SPD
  Matrix R;          // per-step input-increment weight, PSD
  double lambda_l1 = 0.0;
  Vector Rs;         // per-step output setpoint (stacked internally)
  Vector x_current;  // augmented state [Δx; y], dimension n+q

  void validate() const;
};

/// The condensed data: g(ΔU) = ΔUᵀHΔU − 2ΔUᵀq + qᵀH⁻¹q with H = ΦᵀQ̄Φ + R̄
/// and q = ΦᵀQ̄(R̄_s − F·x_current); the constant makes g equal to the
/// squared-norm form ‖H^{1/2}ΔU − H^{−1/2}q‖₂².
struct CondensedLasso {
  QuadraticForm g;
  double lambda_l1 = 0.0;
  Matrix F;
  Matrix Phi;
};

CondensedLasso condense(const MpcSpec& spec);

/// Condense and wrap as a composite problem with h = lambda_l1·‖·‖₁ and
/// lipschitz_L = 2·λ_max(H). The reference optimum is left unset; callers
/// attach one when suboptimality tracking is wanted.
CompositeProblem build_lasso(const MpcSpec& spec);

}  // namespace axprox
