#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gsd/gaussian.hpp"

namespace gsd {

struct EmConfig {
  int max_iterations = 200;
  /// Stop once the mean log-likelihood per observation moves by less than
  /// this between iterations.
  double tolerance = 1e-6;
  /// Component variances are floored at variance_floor * sample variance.
  double variance_floor = 1e-9;

  bool operator==(const EmConfig&) const = default;
};

void validate(const EmConfig& config);

struct MixtureEstimate {
  GaussianClassParams comp_a;
  GaussianClassParams comp_b;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Log-likelihood of the initial parameters followed by one entry per
  /// EM iteration.
  std::vector<double> log_likelihood_trace;
};

/// Two-component univariate Gaussian mixture fitted by EM from `init`.
///
/// A fit is reported non-converged when the iteration budget runs out, when
/// a component collapses onto the variance floor, or when a component's
/// weight drops below 1e-3. Throws insufficient_data for fewer than 10
/// values and degenerate_data when all values are identical.
MixtureEstimate em_fit(std::span<const double> values,
                       const std::pair<GaussianClassParams,
                                       GaussianClassParams>& init,
                       const EmConfig& config = {});

/// Labels the two unlabeled components as (class 0, class 1) by picking the
/// pairing with the smaller total |mean - train mean|. Ties keep comp_a as
/// class 0.
std::pair<GaussianClassParams, GaussianClassParams> assign_components(
    const MixtureEstimate& estimate, const GaussianClassParams& train0,
    const GaussianClassParams& train1);

}  // namespace gsd
