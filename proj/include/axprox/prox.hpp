#pragma once

#include <memory>

#include "axprox/core.hpp"

namespace axprox {

/// Componentwise shrinkage: sign(vᵢ)·max(|vᵢ|−tau, 0). This is
/// argmin_z τ‖z‖₁ + ½‖z−v‖₂².
Vector soft_threshold(const Vector& v, double tau);

/// A proximable convex function: value oracle plus exact proximal operator
/// prox(v, s) = argmin_z h(z) + (1/2s)‖z−v‖₂².
class ProxOp {
 public:
  enum class Kind { zero, l1, squared_l2, box };

  virtual ~ProxOp() = default;
  virtual Kind kind() const = 0;
  virtual double eval(const Vector& x) const = 0;  // extended-real
  virtual Vector prox(const Vector& v, double step) const = 0;
};

/// h ≡ 0; prox is the identity.
class ZeroProx final : public ProxOp {
 public:
  Kind kind() const override { return Kind::zero; }
  double eval(const Vector&) const override { return 0.0; }
  Vector prox(const Vector& v, double) const override { return v; }
};

/// h(x) = weight·‖x‖₁.
class L1Prox final : public ProxOp {
 public:
  explicit L1Prox(double weight);
  Kind kind() const override { return Kind::l1; }
  double eval(const Vector& x) const override;
  Vector prox(const Vector& v, double step) const override;
  double weight() const { return weight_; }

 private:
  double weight_;
};

/// h(x) = weight·‖x‖₂².
class SquaredL2Prox final : public ProxOp {
 public:
  explicit SquaredL2Prox(double weight);
  Kind kind() const override { return Kind::squared_l2; }
  double eval(const Vector& x) const override;
  Vector prox(const Vector& v, double step) const override;
  double weight() const { return weight_; }

 private:
  double weight_;
};

/// Indicator of the box {x : lo ≤ x ≤ hi}; prox is the projection.
class BoxProx final : public ProxOp {
 public:
  BoxProx(Vector lo, Vector hi);
  Kind kind() const override { return Kind::box; }
  double eval(const Vector& x) const override;  // 0 inside, +inf outside
  Vector prox(const Vector& v, double step) const override;
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

 private:
  Vector lo_, hi_;
};

/// Moreau envelope e_λh(x) = min_p h(p) + ‖p−x‖²/(2λ), evaluated at the
/// proximal point.
double moreau_envelope(const ProxOp& h, const Vector& x, double lambda);

/// Data for the weighted proximal step
///   argmin_x scale·φ(x) + ½ xᵀ Λ x − xᵀ γ
/// with Λ symmetric positive definite.
struct WeightedProxSpec {
  Matrix Lambda;
  Vector gamma;
  double scale = 1.0;
};

/// Weighted prox of a convex quadratic: solves (2·scale·H + Λ)x = 2·scale·q + γ.
Vector weighted_prox(const WeightedProxSpec& spec, const QuadraticForm& fun);

/// Weighted prox of a catalog function. L1 and box cases require diagonal
/// Lambda (closed form per component); other combinations throw ConfigError.
Vector weighted_prox(const WeightedProxSpec& spec, const ProxOp& fun);

}  // namespace axprox
