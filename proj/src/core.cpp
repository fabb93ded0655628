#include "axprox/core.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace axprox {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string dim_text(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// splitmix64; used only to fill the deterministic power-iteration start.
std::uint64_t next_u64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double QuadraticForm::value(const Vector& x) const {
  require(H.rows() == H.cols(), "QuadraticForm: H must be square, got " +
                                    dim_text(H.rows(), H.cols()));
  require(q.size() == H.rows(), "QuadraticForm: q has size " +
                                    std::to_string(q.size()) +
                                    ", expected " + std::to_string(H.rows()));
  require(x.size() == H.rows(), "QuadraticForm::value: x has size " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(H.rows()));
  return x.dot(H * x) - 2.0 * q.dot(x) + c;
}

Vector QuadraticForm::gradient(const Vector& x) const {
  require(x.size() == H.rows(), "QuadraticForm::gradient: x has size " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(H.rows()));
  return 2.0 * (H * x) - 2.0 * q;
}

double eval_objective(const CompositeProblem& problem, const Vector& x) {
  require(problem.dim >= 1, "eval_objective: problem.dim must be positive");
  require(x.size() == problem.dim,
          "eval_objective: x has size " + std::to_string(x.size()) +
              ", problem dim is " + std::to_string(problem.dim));
  require(static_cast<bool>(problem.eval_g) && static_cast<bool>(problem.eval_h),
          "eval_objective: problem oracles eval_g/eval_h are not set");
  return problem.eval_g(x) + problem.eval_h(x);
}

double max_eigenvalue(const Matrix& M) {
  require(M.rows() == M.cols(),
          "max_eigenvalue: matrix must be square, got " +
              dim_text(M.rows(), M.cols()));
  require(M.rows() >= 1, "max_eigenvalue: matrix is empty");
  if (!M.allFinite())
    throw NumericalError("max_eigenvalue: matrix has non-finite entries");
  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-10 * std::max(1.0, scale),
          "max_eigenvalue: matrix is not symmetric (max |M-M^T| = " +
              std::to_string(asym) + ")");

  const Eigen::Index n = M.rows();
  // Shift by the infinity norm so the iteration runs on a PSD matrix whose
  // dominant eigenvalue is lambda_max(M) + shift even when |lambda_min| wins
  // in magnitude on M itself.
  const double shift = M.cwiseAbs().rowwise().sum().maxCoeff();
  if (shift == 0.0) return 0.0;
  const Matrix B = M + shift * Matrix::Identity(n, n);

  Vector v(n);
  std::uint64_t state = 0x8badf00d5eedULL;
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = 0.5 + (next_u64(state) >> 11) * 0x1.0p-53;
  v.normalize();

  double lambda = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (long iter = 0; iter < 1000000; ++iter) {
    Vector w = B * v;
    lambda = v.dot(w);  // Rayleigh quotient
    const double wn = w.norm();
    if (wn == 0.0) {
      // Landed exactly in the kernel; restart from a fresh direction.
      for (Eigen::Index i = 0; i < n; ++i)
        v[i] = (next_u64(state) >> 11) * 0x1.0p-53 - 0.5;
      v.normalize();
      continue;
    }
    if (iter > 0 && std::abs(lambda - prev) <= 1e-13 * std::max(1.0, std::abs(lambda)))
      break;
    prev = lambda;
    v = w / wn;
  }
  return lambda - shift;
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f,
                            const Vector& x, double step) {
  require(static_cast<bool>(f), "finite_diff_gradient: function is not set");
  require(step > 0.0, "finite_diff_gradient: step must be positive");
  Vector g(x.size());
  Vector e = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    e[i] = x[i] + step;
    const double fp = f(e);
    e[i] = x[i] - step;
    const double fm = f(e);
    e[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

Vector finite_diff_gradient(const CompositeProblem& problem, const Vector& x,
                            double step) {
  require(x.size() == problem.dim,
          "finite_diff_gradient: x has size " + std::to_string(x.size()) +
              ", problem dim is " + std::to_string(problem.dim));
  return finite_diff_gradient(problem.eval_g, x, step);
}

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw ConfigError("malformed size header in matrix file: " + path);
  Matrix M(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c)
      if (!(in >> M(r, c)))
        throw ConfigError("matrix file truncated or non-numeric: " + path);
  return M;
}

void write_matrix(const std::string& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write matrix file: " + path);
  out << M.rows() << " " << M.cols() << "\n";
  char buf[40];
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", M(r, c));
      out << buf << (c + 1 < M.cols() ? " " : "");
    }
    out << "\n";
  }
  if (!out) throw ConfigError("failed while writing matrix file: " + path);
}

Vector read_vector(const std::string& path) {
  Matrix M = read_matrix(path);
  if (M.cols() == 1) return M.col(0);
  if (M.rows() == 1) return M.row(0).transpose();
  throw ConfigError("vector file must be n x 1 or 1 x n, got " +
                    dim_text(M.rows(), M.cols()) + ": " + path);
}

void write_vector(const std::string& path, const Vector& v) {
  Matrix M(v.size(), 1);
  M.col(0) = v;
  write_matrix(path, M);
}

}  // namespace axprox
