#include "axprox/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace axprox {

namespace {

constexpr double kBulkFraction = 0.9;  // bulk support is [-0.9M, 0.9M]

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

// Second moment of the extreme component: |entry| ~ uniform[a, M].
double extreme_second_moment(double M) {
  const double a = kBulkFraction * M;
  return (M * M * M - a * a * a) / (3.0 * (M - a));
}

// Variance of a zero-mean Gaussian with scale sd truncated to [-a, a].
double truncated_variance(double sd, double a) {
  if (sd == 0.0) return 0.0;
  const double alpha = a / sd;
  const double phi =
      std::exp(-0.5 * alpha * alpha) / std::sqrt(2.0 * std::numbers::pi);
  const double mass = std::erf(alpha / std::sqrt(2.0));  // P(|X| <= a)/1 for X~N(0,sd)
  if (mass <= 0.0) return a * a / 3.0;  // sd >> a: effectively uniform
  return sd * sd * (1.0 - 2.0 * alpha * phi / mass);
}

// Scale the bulk Gaussian so the extreme/bulk mixture has variance sigma^2
// exactly. truncated_variance is increasing in sd with range (0, a^2/3), so
// bisection on sd is safe.
double solve_body_sigma(const GradientErrorModel& m) {
  const double a = kBulkFraction * m.bound_M;
  const double target_total = m.sigma * m.sigma;
  const double q = m.extreme_prob;
  const double spike = q * extreme_second_moment(m.bound_M);
  if (target_total == 0.0) {
    require(q == 0.0,
            "gradient error model: extreme_prob must be 0 when sigma is 0");
    return 0.0;
  }
  double target = (target_total - spike) / (1.0 - q);
  require(target >= -1e-15 * target_total,
          "gradient error model: extreme_prob is too large for sigma (the "
          "extreme component alone exceeds the requested variance)");
  target = std::max(target, 0.0);
  if (target == 0.0) return 0.0;
  const double cap = a * a / 3.0;
  require(target < cap * (1.0 - 1e-12),
          "gradient error model: sigma is too large for bound_M; the bulk "
          "component cannot reach the requested variance");

  double lo = std::sqrt(target);  // truncation only shrinks variance
  double hi = lo;
  while (truncated_variance(hi, a) < target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (truncated_variance(mid, a) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double RngStream::uniform01() {
  return (gen_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) {
  return a + (b - a) * uniform01();
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

double RngStream::normal(double mean, double sd) {
  return mean + sd * normal();
}

Vector random_unit_vector(Eigen::Index dim, RngStream& stream) {
  if (dim < 1) throw ConfigError("random_unit_vector: dim must be >= 1");
  Vector v(dim);
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = stream.normal();
    n = v.norm();
  } while (n < 1e-12);
  return v / n;
}

void GradientErrorModel::validate() const {
  require(bound_M > 0.0, "gradient error model: bound_M must be positive");
  require(sigma >= 0.0, "gradient error model: sigma must be nonnegative");
  require(extreme_prob >= 0.0 && extreme_prob < 1.0,
          "gradient error model: extreme_prob must lie in [0, 1)");
  require(sigma * sigma <= bound_M / 14.0 * (1.0 + 1e-12),
          "gradient error model: requires sigma^2 <= bound_M/14, got sigma^2 = " +
              std::to_string(sigma * sigma) + " with bound_M/14 = " +
              std::to_string(bound_M / 14.0));
  solve_body_sigma(*this);  // feasibility of the mixture itself
}

GradientErrorSampler::GradientErrorSampler(const GradientErrorModel& model)
    : model_(model) {
  model_.validate();
  body_sigma_ = solve_body_sigma(model_);
}

Vector GradientErrorSampler::sample(Eigen::Index dim, RngStream& stream) const {
  if (dim < 1) throw ConfigError("sample_gradient_error: dim must be >= 1");
  if (model_.sigma == 0.0 && model_.extreme_prob == 0.0)
    return Vector::Zero(dim);  // degenerate model consumes no randomness
  const double a = kBulkFraction * model_.bound_M;
  Vector out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (model_.extreme_prob > 0.0 &&
        stream.uniform01() < model_.extreme_prob) {
      const double mag = stream.uniform(a, model_.bound_M);
      out[i] = stream.uniform01() < 0.5 ? -mag : mag;
      continue;
    }
    if (body_sigma_ == 0.0) {
      out[i] = 0.0;
      continue;
    }
    double x;
    do {
      x = stream.normal(0.0, body_sigma_);
    } while (std::abs(x) > a);
    out[i] = x;
  }
  return out;
}

Vector sample_gradient_error(const GradientErrorModel& model, Eigen::Index dim,
                             RngStream& stream) {
  return GradientErrorSampler(model).sample(dim, stream);
}

void ProxErrorModel::validate() const {
  require(eps0 >= 0.0, "prox error model: eps0 must be nonnegative");
  require(sigma >= 0.0, "prox error model: sigma must be nonnegative");
  require(mean >= 0.0, "prox error model: mean must be nonnegative");
  if (eps0 == 0.0) {
    require(mean == 0.0 && sigma == 0.0,
            "prox error model: eps0 = 0 requires mean = 0 and sigma = 0");
    return;
  }
  require(mean < eps0, "prox error model: mean must be strictly below eps0");
  require(sigma * sigma <= eps0 / 14.0 * (1.0 + 1e-12),
          "prox error model: requires sigma^2 <= eps0/14, got sigma^2 = " +
              std::to_string(sigma * sigma) + " with eps0/14 = " +
              std::to_string(eps0 / 14.0));
}

double sample_prox_error(const ProxErrorModel& model, RngStream& stream) {
  const double w = std::min(model.mean, model.eps0 - model.mean);
  if (w <= 0.0 || model.sigma == 0.0) return model.mean;
  double e;
  do {
    e = stream.normal(model.mean, model.sigma);
  } while (std::abs(e - model.mean) > w);
  return e;
}

bool StreamReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string StreamReport::to_string() const {
  std::ostringstream out;
  for (const auto& c : checks)
    out << (c.pass ? "PASS" : "FAIL") << "  " << c.name
        << "  statistic=" << c.statistic << "  threshold=" << c.threshold
        << "\n";
  return out.str();
}

namespace {

enum class VarCheck { two_sided, upper_only };

StreamReport check_scalar_stream(const std::vector<double>& xs, double lo,
                                 double hi, double expected_mean,
                                 double model_sigma, VarCheck var_mode) {
  if (xs.size() < 10000)
    throw ConfigError("validate_error_stream: needs at least 10^4 samples, got " +
                      std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());

  StreamReport report;

  double worst = 0.0;
  for (double x : xs) worst = std::max(worst, std::max(lo - x, x - hi));
  report.checks.push_back(
      {"support_bound", worst, 0.0, worst <= 0.0});

  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  const double mean_tol = 4.0 * model_sigma / std::sqrt(n);
  report.checks.push_back({"mean", mean - expected_mean, mean_tol,
                           std::abs(mean - expected_mean) <= mean_tol});

  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1.0);
  const double var_target = model_sigma * model_sigma;
  bool var_ok = var_mode == VarCheck::two_sided
                    ? std::abs(var - var_target) <= 0.10 * var_target
                    : var <= 1.10 * var_target;
  if (var_target == 0.0) var_ok = (var == 0.0);
  report.checks.push_back({"variance", var, var_target, var_ok});

  double cov = 0.0, denom = 0.0;
  for (size_t t = 0; t + 1 < xs.size(); ++t)
    cov += (xs[t] - mean) * (xs[t + 1] - mean);
  for (double x : xs) denom += (x - mean) * (x - mean);
  const double rho = denom > 0.0 ? cov / denom : 0.0;
  const double rho_tol = 4.0 / std::sqrt(n);
  report.checks.push_back(
      {"lag1_autocorr", rho, rho_tol, std::abs(rho) <= rho_tol});

  return report;
}

}  // namespace

StreamReport validate_error_stream(const std::vector<Vector>& samples,
                                   const GradientErrorModel& model) {
  model.validate();
  std::vector<double> xs;
  size_t total = 0;
  for (const auto& v : samples) total += static_cast<size_t>(v.size());
  xs.reserve(total);
  for (const auto& v : samples)
    for (Eigen::Index i = 0; i < v.size(); ++i) xs.push_back(v[i]);
  return check_scalar_stream(xs, -model.bound_M, model.bound_M, 0.0,
                             model.sigma, VarCheck::two_sided);
}

StreamReport validate_error_stream(const std::vector<double>& samples,
                                   const ProxErrorModel& model) {
  model.validate();
  return check_scalar_stream(samples, 0.0, model.eps0, model.mean, model.sigma,
                             VarCheck::upper_only);
}

}  // namespace axprox
