#include "gsd/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gsd/error.hpp"

namespace gsd {
namespace {

constexpr double kDegenerateScale = 1e-12;
constexpr double kTieTolerance = 1e-12;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::invalid_argument,
                std::string(name) + " must be finite");
  }
}

void require_positive_std(double std_dev) {
  require_finite(std_dev, "std_dev");
  if (!(std_dev > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "std_dev must be positive");
  }
}

}  // namespace

void validate(const GaussianClassParams& params) {
  require_finite(params.mean, "mean");
  require_positive_std(params.std_dev);
  require_finite(params.proportion, "proportion");
  if (!(params.proportion > 0.0 && params.proportion < 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "proportion must lie strictly between 0 and 1");
  }
}

double normal_pdf(double x, double mean, double std_dev) {
  require_finite(x, "x");
  require_finite(mean, "mean");
  require_positive_std(std_dev);
  const double z = (x - mean) / std_dev;
  return std::exp(-0.5 * z * z) /
         (std_dev * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x, double mean, double std_dev) {
  require_finite(x, "x");
  require_finite(mean, "mean");
  require_positive_std(std_dev);
  // erfc keeps full relative precision in the lower tail, unlike 1 + erf.
  const double z = (x - mean) / std_dev;
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double misclassification_area(const GaussianClassParams& c0,
                              const GaussianClassParams& c1, double alpha) {
  validate(c0);
  validate(c1);
  require_finite(alpha, "alpha");
  const double f0 = normal_cdf(alpha, c0.mean, c0.std_dev);
  const double f1 = normal_cdf(alpha, c1.mean, c1.std_dev);
  // Upper tails via erfc directly so far-tail mass is not lost to 1 - F.
  const double s0 = normal_cdf(-alpha, -c0.mean, c0.std_dev);
  const double s1 = normal_cdf(-alpha, -c1.mean, c1.std_dev);
  return std::min(c0.proportion * f0, c1.proportion * f1) +
         std::min(c0.proportion * s0, c1.proportion * s1);
}

std::vector<double> boundary_candidates(const GaussianClassParams& c0,
                                        const GaussianClassParams& c1) {
  validate(c0);
  validate(c1);
  if (c0.mean == c1.mean && c0.std_dev == c1.std_dev) return {};

  const double v0 = c0.std_dev * c0.std_dev;
  const double v1 = c1.std_dev * c1.std_dev;
  // Zero set of ln(p1 phi1) - ln(p0 phi0) = a x^2 + b x + c.
  const double a = 1.0 / (2.0 * v0) - 1.0 / (2.0 * v1);
  const double b = c1.mean / v1 - c0.mean / v0;
  // Grouped so that swapping the classes negates c exactly.
  const double log_ratio =
      (std::log(c0.proportion) + std::log(c1.std_dev)) -
      (std::log(c1.proportion) + std::log(c0.std_dev));
  const double c = (c0.mean * c0.mean / (2.0 * v0) -
                    c1.mean * c1.mean / (2.0 * v1)) -
                   log_ratio;

  if (std::abs(a) < kDegenerateScale * (1.0 / v0 + 1.0 / v1)) {
    if (b == 0.0) return {};
    const double root = -c / b;
    if (!std::isfinite(root)) return {};
    return {root};
  }

  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  if (disc == 0.0) return {-b / (2.0 * a)};

  // Cancellation-free pair: q / a and c / q.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  std::vector<double> roots;
  roots.reserve(2);
  roots.push_back(q / a);
  if (q != 0.0) roots.push_back(c / q);
  std::erase_if(roots, [](double r) { return !std::isfinite(r); });
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::optional<BoundaryResult> select_boundary(const GaussianClassParams& c0,
                                              const GaussianClassParams& c1) {
  const std::vector<double> roots = boundary_candidates(c0, c1);
  if (roots.empty()) return std::nullopt;

  BoundaryResult best;
  best.root_count = static_cast<int>(roots.size());
  bool have = false;
  for (const double root : roots) {  // ascending, so ties keep the smaller
    const double e = misclassification_area(c0, c1, root);
    if (!have || e < best.error - kTieTolerance) {
      best.alpha = root;
      best.error = e;
      have = true;
    }
  }
  return best;
}

}  // namespace gsd
