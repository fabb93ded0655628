#include "axprox/mpc.hpp"

#include "axprox/prox.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace axprox {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_symmetric(const Matrix& M, const char* name) {
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  require((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
          std::string("mpc: ") + name + " must be symmetric");
}

}  // namespace

void StateSpace::validate() const {
  const Eigen::Index n = A.rows();
  require(n >= 1 && A.cols() == n, "mpc: A must be a nonempty square matrix");
  require(B.rows() == n && B.cols() >= 1,
          "mpc: B must have one row per state and at least one column");
  require(C.cols() == n && C.rows() >= 1,
          "mpc: C must have one column per state and at least one row");
  if (D.size() != 0)
    require(D.rows() == C.rows() && D.cols() == B.cols(),
            "mpc: D, when given, must be (outputs x inputs)");
  require(std::isfinite(h) && h > 0.0,
          "mpc: sampling period h must be positive");
  require(A.allFinite() && B.allFinite() && C.allFinite() &&
              (D.size() == 0 || D.allFinite()),
          "mpc: state-space matrices must be finite");
}

std::pair<Matrix, Matrix> zoh_discretize(const StateSpace& ss) {
  ss.validate();
  const Eigen::Index n = ss.A.rows();
  const Eigen::Index m = ss.B.cols();
  Matrix blk = Matrix::Zero(n + m, n + m);
  blk.topLeftCorner(n, n) = ss.A;
  blk.topRightCorner(n, m) = ss.B;
  const Matrix E = (blk * ss.h).exp();
  if (!E.allFinite())
    throw NumericalError("mpc: matrix exponential overflowed in zoh_discretize");
  return {E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

AugmentedSystem augment(const Matrix& A_d, const Matrix& B_d, const Matrix& C) {
  const Eigen::Index n = A_d.rows();
  require(n >= 1 && A_d.cols() == n, "mpc: A_d must be square");
  require(B_d.rows() == n && B_d.cols() >= 1, "mpc: B_d must be n x m");
  require(C.cols() == n && C.rows() >= 1, "mpc: C must be q x n");
  const Eigen::Index m = B_d.cols();
  const Eigen::Index q = C.rows();

  AugmentedSystem out;
  out.A_a = Matrix::Zero(n + q, n + q);
  out.A_a.topLeftCorner(n, n) = A_d;
  out.A_a.bottomLeftCorner(q, n) = C * A_d;
  out.A_a.bottomRightCorner(q, q) = Matrix::Identity(q, q);
  out.B_a = Matrix::Zero(n + q, m);
  out.B_a.topRows(n) = B_d;
  out.B_a.bottomRows(q) = C * B_d;
  out.C_a = Matrix::Zero(q, n + q);
  out.C_a.rightCols(q) = Matrix::Identity(q, q);
  return out;
}

PredictionMatrices prediction_matrices(const Matrix& A_a, const Matrix& B_a,
                                       const Matrix& C_a, int Np, int Nc) {
  const Eigen::Index na = A_a.rows();
  require(na >= 1 && A_a.cols() == na, "mpc: A_a must be square");
  require(B_a.rows() == na && B_a.cols() >= 1, "mpc: B_a must be na x m");
  require(C_a.cols() == na && C_a.rows() >= 1, "mpc: C_a must be q x na");
  require(Np >= 1, "mpc: Np must be at least 1");
  require(Nc >= 1 && Nc <= Np, "mpc: Nc must satisfy 1 <= Nc <= Np");
  const Eigen::Index m = B_a.cols();
  const Eigen::Index q = C_a.rows();

  // CA[d] = C_a·A_a^d; F needs d = 1..Np, Phi needs G[d] = CA[d]·B_a, d < Np.
  std::vector<Matrix> CA(static_cast<size_t>(Np) + 1);
  CA[0] = C_a;
  for (int d = 1; d <= Np; ++d) CA[d] = CA[d - 1] * A_a;

  PredictionMatrices out;
  out.F.resize(Np * q, na);
  for (int i = 1; i <= Np; ++i) out.F.middleRows((i - 1) * q, q) = CA[i];

  std::vector<Matrix> G(static_cast<size_t>(Np));
  for (int d = 0; d < Np; ++d) G[d] = CA[d] * B_a;
  out.Phi = Matrix::Zero(Np * q, Nc * m);
  for (int i = 1; i <= Np; ++i)
    for (int j = 1; j <= std::min(i, Nc); ++j)
      out.Phi.block((i - 1) * q, (j - 1) * m, q, m) = G[i - j];
  return out;
}

void MpcSpec::validate() const {
  ss.validate();
  const Eigen::Index n = ss.A.rows();
  const Eigen::Index m = ss.B.cols();
  const Eigen::Index q = ss.C.rows();
  require(Np >= 1, "mpc: Np must be at least 1");
  require(Nc >= 1 && Nc <= Np, "mpc: Nc must satisfy 1 <= Nc <= Np");
  require(Q.rows() == q && Q.cols() == q,
          "mpc: Q must be q x q (per-step output weight)");
  require(R.rows() == m && R.cols() == m,
          "mpc: R must be m x m (per-step input weight)");
  require(Q.allFinite() && R.allFinite(), "mpc: Q and R must be finite");
  check_symmetric(Q, "Q");
  check_symmetric(R, "R");
  const Matrix Qs = 0.5 * (Q + Q.transpose());
  require(Eigen::LLT<Matrix>(Qs).info() == Eigen::Success,
          "mpc: Q must be positive definite");
  const Matrix Rs_sym = 0.5 * (R + R.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(Rs_sym,
                                           Eigen::EigenvaluesOnly);
  const double r_scale = std::max(1.0, Rs_sym.cwiseAbs().maxCoeff());
  require(es.eigenvalues().minCoeff() >= -1e-10 * r_scale,
          "mpc: R must be positive semidefinite");
  require(std::isfinite(lambda_l1) && lambda_l1 >= 0.0,
          "mpc: lambda_l1 must be nonnegative");
  require(Rs.size() == q, "mpc: Rs must have one entry per output");
  require(x_current.size() == n + q,
          "mpc: x_current must have dimension n + q (augmented state)");
  require(Rs.allFinite() && x_current.allFinite(),
          "mpc: Rs and x_current must be finite");
}

CondensedLasso condense(const MpcSpec& spec) {
  spec.validate();
  const Eigen::Index m = spec.ss.B.cols();
  const Eigen::Index q = spec.ss.C.rows();

  const auto [A_d, B_d] = zoh_discretize(spec.ss);
  const AugmentedSystem aug = augment(A_d, B_d, spec.ss.C);
  PredictionMatrices pred =
      prediction_matrices(aug.A_a, aug.B_a, aug.C_a, spec.Np, spec.Nc);

  Matrix Qbar = Matrix::Zero(spec.Np * q, spec.Np * q);
  for (int i = 0; i < spec.Np; ++i)
    Qbar.block(i * q, i * q, q, q) = 0.5 * (spec.Q + spec.Q.transpose());
  Matrix Rbar = Matrix::Zero(spec.Nc * m, spec.Nc * m);
  for (int j = 0; j < spec.Nc; ++j)
    Rbar.block(j * m, j * m, m, m) = 0.5 * (spec.R + spec.R.transpose());
  Vector setpoint(spec.Np * q);
  for (int i = 0; i < spec.Np; ++i) setpoint.segment(i * q, q) = spec.Rs;

  Matrix H = pred.Phi.transpose() * Qbar * pred.Phi + Rbar;
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success)
    throw NumericalError(
        "mpc: condensed Hessian is not positive definite; increase R or "
        "shorten the horizon");
  const Vector qvec =
      pred.Phi.transpose() * (Qbar * (setpoint - pred.F * spec.x_current));
  const double c = qvec.dot(llt.solve(qvec));

  CondensedLasso out;
  out.g = QuadraticForm{std::move(H), qvec, c};
  out.lambda_l1 = spec.lambda_l1;
  out.F = std::move(pred.F);
  out.Phi = std::move(pred.Phi);
  return out;
}

CompositeProblem build_lasso(const MpcSpec& spec) {
  auto data = std::make_shared<CondensedLasso>(condense(spec));
  const double lam = data->lambda_l1;

  CompositeProblem p;
  p.dim = data->g.dim();
  p.grad_g = [data](const Vector& x) { return data->g.gradient(x); };
  p.eval_g = [data](const Vector& x) { return data->g.value(x); };
  p.eval_h = [lam](const Vector& x) { return lam * x.lpNorm<1>(); };
  p.prox_h = [lam](const Vector& v, double step) {
    return soft_threshold(v, lam * step);
  };
  p.lipschitz_L = 2.0 * max_eigenvalue(data->g.H);
  return p;
}

}  // namespace axprox
