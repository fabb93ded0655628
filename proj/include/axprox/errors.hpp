#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "axprox/core.hpp"

namespace axprox {

/// Seedable deterministic random stream. The generator is mt19937_64 and all
/// variate transforms are implemented here (not via std::*_distribution, whose
/// output is implementation-defined), so a seed reproduces the exact same
/// sample sequence on any platform with IEEE doubles.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform01();
  /// Uniform on [a,b).
  double uniform(double a, double b);
  /// Standard normal via the Marsaglia polar method (caches the spare).
  double normal();
  double normal(double mean, double sd);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Uniformly distributed direction: normalized standard-normal vector.
Vector random_unit_vector(Eigen::Index dim, RngStream& stream);

enum class GradientErrorMode { absolute, relative };

/// Bounded zero-mean per-entry gradient error. In relative mode bound_M is the
/// relative factor delta; the solver scales each raw draw by the running
/// sup-norm of the gradients seen so far.
struct GradientErrorModel {
  double bound_M = 1.0;       // per-entry magnitude bound M (or delta)
  double sigma = 0.0;         // per-entry standard deviation
  GradientErrorMode mode = GradientErrorMode::absolute;
  double extreme_prob = 0.0;  // chance an entry is a near-bound event
  std::uint64_t seed = 0;

  /// Throws ConfigError unless sigma² ≤ bound_M/14 and the mixture below can
  /// realize the requested variance.
  void validate() const;
};

/// Realizes GradientErrorModel as a mixture: with probability extreme_prob an
/// entry is ±uniform[0.9M, M]; otherwise a zero-mean Gaussian truncated to
/// [−0.9M, 0.9M]. The inner Gaussian's scale is solved at construction so the
/// total per-entry variance equals sigma² exactly.
class GradientErrorSampler {
 public:
  explicit GradientErrorSampler(const GradientErrorModel& model);
  /// One error vector; every entry lies in [−bound_M, bound_M].
  Vector sample(Eigen::Index dim, RngStream& stream) const;
  double body_sigma() const { return body_sigma_; }

 private:
  GradientErrorModel model_;
  double body_sigma_ = 0.0;  // pre-truncation scale of the bulk component
};

Vector sample_gradient_error(const GradientErrorModel& model, Eigen::Index dim,
                             RngStream& stream);

/// Bounded nonnegative proximal error level with a stationary mean.
struct ProxErrorModel {
  double eps0 = 0.0;   // almost-sure upper bound
  double sigma = 0.0;  // scale cap: realized variance never exceeds sigma²
  double mean = 0.0;   // stationary mean
  std::uint64_t seed = 0;

  void validate() const;  // mean < eps0 (unless both 0), sigma² ≤ eps0/14
};

/// One error level in [0, eps0] with exact mean model.mean: a Gaussian of
/// scale model.sigma centered at the mean, rejection-truncated to the
/// symmetric window [mean−w, mean+w] with w = min(mean, eps0−mean). Symmetry
/// makes the mean exact; truncation keeps the support and caps the variance.
/// The residual direction that realizes this error level is drawn separately
/// by the solver (random_unit_vector on the same stream).
double sample_prox_error(const ProxErrorModel& model, RngStream& stream);

struct CheckResult {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct StreamReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  std::string to_string() const;
};

/// Statistical compliance report for a sampled error stream: support bound
/// (hard), mean (|m − expected| ≤ 4σ/√N), variance (±10% of the model's, for
/// the gradient model; ≤ the cap for the prox model), and lag-1
/// autocorrelation (|ρ₁| ≤ 4/√N). Requires ≥ 10⁴ scalar samples.
StreamReport validate_error_stream(const std::vector<Vector>& samples,
                                   const GradientErrorModel& model);
StreamReport validate_error_stream(const std::vector<double>& samples,
                                   const ProxErrorModel& model);

}  // namespace axprox
