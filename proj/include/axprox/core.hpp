#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace axprox {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised for invalid configuration or malformed input (bad dimensions,
/// parameter constraints violated, unparseable files). CLI maps it to exit 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computation produces non-finite values or an iterative
/// routine fails to converge. CLI maps it to exit 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Convex quadratic in the expanded form g(x) = xᵀHx − 2qᵀx + c with H
/// symmetric positive semidefinite.
struct QuadraticForm {
  Matrix H;
  Vector q;
  double c = 0.0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;  // 2Hx − 2q
  Eigen::Index dim() const { return H.rows(); }
};

struct ReferenceOptimum {
  Vector x_star;
  double f_star = 0.0;
};

/// Composite objective f(x) = g(x) + h(x): smooth g given by value/gradient
/// oracles, nonsmooth h given by value/prox oracles.
struct CompositeProblem {
  Eigen::Index dim = 0;
  std::function<Vector(const Vector&)> grad_g;
  std::function<double(const Vector&)> eval_g;
  std::function<double(const Vector&)> eval_h;   // may return +inf
  std::function<Vector(const Vector&, double)> prox_h;  // (point, step)
  double lipschitz_L = 0.0;
  std::optional<ReferenceOptimum> reference_opt;
};

/// f(x) = eval_g(x) + eval_h(x). Throws ConfigError on dimension mismatch.
double eval_objective(const CompositeProblem& problem, const Vector& x);

struct TraceRecord {
  long k = 0;
  double f_value = 0.0;
  double suboptimality = 0.0;       // NaN when no reference optimum is known
  double grad_error_inf_norm = 0.0;  // splitting solver: g-block prox error
  double prox_error_eps = 0.0;
  double constraint_residual = 0.0;  // ‖Ax+Bz−c‖₂; NaN for non-splitting runs
};

struct IterateTrace {
  std::vector<TraceRecord> records;
  std::uint64_t seed = 0;
  std::string config_summary;
  Vector final_x;
  Vector final_z;  // splitting solver only; size 0 otherwise
  double grad_sup_inf_norm = 0.0;  // sup over the run of ‖∇g‖∞ (M_∇g)
};

/// Largest eigenvalue of a symmetric matrix via shifted power iteration.
/// The shift c = ‖M‖∞ makes M + cI positive semidefinite so the dominant
/// eigenvalue of the shifted matrix is λ_max(M) + c even when |λ_min| > λ_max.
double max_eigenvalue(const Matrix& M);

/// Central-difference gradient of a scalar function; used to cross-check
/// analytic gradients.
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f,
                            const Vector& x, double step);
Vector finite_diff_gradient(const CompositeProblem& problem, const Vector& x,
                            double step);

/// Text matrix format: first line "rows cols", then `rows` lines of `cols`
/// whitespace-separated decimals. Written with 17 significant digits so
/// doubles round-trip exactly.
Matrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Matrix& M);
Vector read_vector(const std::string& path);  // accepts n×1 or 1×n files
void write_vector(const std::string& path, const Vector& v);

}  // namespace axprox
