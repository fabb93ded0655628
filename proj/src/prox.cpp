#include "axprox/prox.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace axprox {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_weighted_spec(const WeightedProxSpec& spec) {
  require(spec.Lambda.rows() == spec.Lambda.cols(),
          "weighted_prox: Lambda must be square");
  require(spec.Lambda.rows() >= 1, "weighted_prox: Lambda is empty");
  require(spec.gamma.size() == spec.Lambda.rows(),
          "weighted_prox: gamma has size " + std::to_string(spec.gamma.size()) +
              ", Lambda is " + std::to_string(spec.Lambda.rows()) + "x" +
              std::to_string(spec.Lambda.cols()));
  require(spec.scale > 0.0, "weighted_prox: scale must be positive");
  const double scale = spec.Lambda.cwiseAbs().maxCoeff();
  const double asym = (spec.Lambda - spec.Lambda.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-10 * std::max(1.0, scale),
          "weighted_prox: Lambda is not symmetric");
}

// SPD test: Cholesky succeeds only for positive-definite matrices.
bool is_spd(const Matrix& M) {
  Eigen::LLT<Matrix> llt(M);
  return llt.info() == Eigen::Success;
}

bool is_diagonal(const Matrix& M) {
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c)
      if (r != c && M(r, c) != 0.0) return false;
  return true;
}

}  // namespace

Vector soft_threshold(const Vector& v, double tau) {
  require(tau >= 0.0, "soft_threshold: tau must be nonnegative");
  return v.unaryExpr([tau](double a) {
    const double m = std::abs(a) - tau;
    return m > 0.0 ? (a > 0.0 ? m : -m) : 0.0;
  });
}

L1Prox::L1Prox(double weight) : weight_(weight) {
  require(weight >= 0.0, "L1Prox: weight must be nonnegative");
}

double L1Prox::eval(const Vector& x) const {
  return weight_ * x.lpNorm<1>();
}

Vector L1Prox::prox(const Vector& v, double step) const {
  require(step > 0.0, "L1Prox::prox: step must be positive");
  return soft_threshold(v, step * weight_);
}

SquaredL2Prox::SquaredL2Prox(double weight) : weight_(weight) {
  require(weight >= 0.0, "SquaredL2Prox: weight must be nonnegative");
}

double SquaredL2Prox::eval(const Vector& x) const {
  return weight_ * x.squaredNorm();
}

Vector SquaredL2Prox::prox(const Vector& v, double step) const {
  require(step > 0.0, "SquaredL2Prox::prox: step must be positive");
  return v / (1.0 + 2.0 * weight_ * step);
}

BoxProx::BoxProx(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  require(lo_.size() == hi_.size(), "BoxProx: lo and hi must have equal size");
  for (Eigen::Index i = 0; i < lo_.size(); ++i)
    require(lo_[i] <= hi_[i], "BoxProx: lo must not exceed hi componentwise");
}

double BoxProx::eval(const Vector& x) const {
  require(x.size() == lo_.size(), "BoxProx::eval: dimension mismatch");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < lo_[i] || x[i] > hi_[i])
      return std::numeric_limits<double>::infinity();
  return 0.0;
}

Vector BoxProx::prox(const Vector& v, double step) const {
  require(step > 0.0, "BoxProx::prox: step must be positive");
  require(v.size() == lo_.size(), "BoxProx::prox: dimension mismatch");
  return v.cwiseMax(lo_).cwiseMin(hi_);
}

double moreau_envelope(const ProxOp& h, const Vector& x, double lambda) {
  require(lambda > 0.0, "moreau_envelope: lambda must be positive");
  const Vector p = h.prox(x, lambda);
  return h.eval(p) + (p - x).squaredNorm() / (2.0 * lambda);
}

Vector weighted_prox(const WeightedProxSpec& spec, const QuadraticForm& fun) {
  check_weighted_spec(spec);
  require(fun.H.rows() == spec.Lambda.rows(),
          "weighted_prox: quadratic dimension " + std::to_string(fun.H.rows()) +
              " does not match Lambda dimension " +
              std::to_string(spec.Lambda.rows()));
  require(is_spd(spec.Lambda), "weighted_prox: Lambda is not positive definite");
  const Matrix K = 2.0 * spec.scale * fun.H + spec.Lambda;
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success)
    throw ConfigError(
        "weighted_prox: the quadratic subproblem matrix 2*scale*H + Lambda is "
        "not positive definite");
  return llt.solve(spec.gamma + 2.0 * spec.scale * fun.q);
}

Vector weighted_prox(const WeightedProxSpec& spec, const ProxOp& fun) {
  check_weighted_spec(spec);
  require(is_spd(spec.Lambda), "weighted_prox: Lambda is not positive definite");
  const Eigen::Index n = spec.Lambda.rows();

  switch (fun.kind()) {
    case ProxOp::Kind::zero: {
      Eigen::LLT<Matrix> llt(spec.Lambda);
      return llt.solve(spec.gamma);
    }
    case ProxOp::Kind::squared_l2: {
      const auto& sq = static_cast<const SquaredL2Prox&>(fun);
      Matrix K = spec.Lambda;
      K.diagonal().array() += 2.0 * spec.scale * sq.weight();
      Eigen::LLT<Matrix> llt(K);
      return llt.solve(spec.gamma);
    }
    case ProxOp::Kind::l1: {
      require(is_diagonal(spec.Lambda),
              "weighted_prox: the l1 term has a closed form only for diagonal "
              "Lambda; got a non-diagonal matrix");
      const auto& l1 = static_cast<const L1Prox&>(fun);
      Vector out(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = spec.Lambda(i, i);
        const double m = spec.gamma[i] / d;
        const double tau = spec.scale * l1.weight() / d;
        const double mag = std::abs(m) - tau;
        out[i] = mag > 0.0 ? (m > 0.0 ? mag : -mag) : 0.0;
      }
      return out;
    }
    case ProxOp::Kind::box: {
      require(is_diagonal(spec.Lambda),
              "weighted_prox: the box indicator has a closed form only for "
              "diagonal Lambda; got a non-diagonal matrix");
      const auto& box = static_cast<const BoxProx&>(fun);
      require(box.lo().size() == n, "weighted_prox: box dimension mismatch");
      Vector out(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = spec.gamma[i] / spec.Lambda(i, i);
        out[i] = std::min(std::max(m, box.lo()[i]), box.hi()[i]);
      }
      return out;
    }
  }
  throw ConfigError("weighted_prox: unsupported function kind");
}

}  // namespace axprox
