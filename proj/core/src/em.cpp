#include "gsd/em.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsd/error.hpp"

namespace gsd {
namespace {

constexpr std::size_t kMinValues = 10;
constexpr double kMinProportion = 1e-3;

struct Component {
  double mean;
  double var;
  double weight;
};

double log_weighted_density(double x, const Component& c) {
  const double d = x - c.mean;
  return std::log(c.weight) - 0.5 * std::log(2.0 * std::numbers::pi * c.var) -
         0.5 * d * d / c.var;
}

struct Moments {
  double sum_r = 0.0;
  double sum_rx = 0.0;
};

}  // namespace

void validate(const EmConfig& config) {
  if (config.max_iterations < 1) {
    throw Error(ErrorCode::invalid_argument, "max_iterations must be >= 1");
  }
  if (!(config.tolerance > 0.0) || !std::isfinite(config.tolerance)) {
    throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  }
  if (!(config.variance_floor >= 0.0) || !std::isfinite(config.variance_floor)) {
    throw Error(ErrorCode::invalid_argument,
                "variance_floor must be non-negative");
  }
}

MixtureEstimate em_fit(std::span<const double> values,
                       const std::pair<GaussianClassParams,
                                       GaussianClassParams>& init,
                       const EmConfig& config) {
  validate(config);
  validate(init.first);
  validate(init.second);
  if (values.size() < kMinValues) {
    throw Error(ErrorCode::insufficient_data,
                "EM needs at least 10 values, got " +
                    std::to_string(values.size()));
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double x : values) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::invalid_argument, "EM input must be finite");
    }
    mean += x;
  }
  mean /= n;
  double sample_var = 0.0;
  for (const double x : values) sample_var += (x - mean) * (x - mean);
  sample_var /= n;
  if (!(sample_var > 0.0)) {
    throw Error(ErrorCode::degenerate_data,
                "all values are identical; no mixture is identifiable");
  }
  const double var_floor = config.variance_floor * sample_var;

  Component a{init.first.mean, init.first.std_dev * init.first.std_dev,
              init.first.proportion};
  Component b{init.second.mean, init.second.std_dev * init.second.std_dev,
              init.second.proportion};
  {
    const double total = a.weight + b.weight;
    a.weight /= total;
    b.weight /= total;
  }

  std::vector<double> resp_a(values.size());
  std::vector<double> resp_b(values.size());

  // E-step: fills responsibilities and returns the log-likelihood of (a, b).
  const auto expect = [&]() {
    double ll = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double la = log_weighted_density(values[i], a);
      const double lb = log_weighted_density(values[i], b);
      const double m = std::max(la, lb);
      const double lse = m + std::log(std::exp(la - m) + std::exp(lb - m));
      resp_a[i] = std::exp(la - lse);
      resp_b[i] = std::exp(lb - lse);
      ll += lse;
    }
    return ll;
  };

  MixtureEstimate out;
  double ll_prev = expect();
  out.log_likelihood_trace.push_back(ll_prev);

  bool degenerate = false;
  for (int it = 1; it <= config.max_iterations; ++it) {
    Moments ma;
    Moments mb;
    for (std::size_t i = 0; i < values.size(); ++i) {
      ma.sum_r += resp_a[i];
      ma.sum_rx += resp_a[i] * values[i];
      mb.sum_r += resp_b[i];
      mb.sum_rx += resp_b[i] * values[i];
    }
    out.iterations = it;
    const double total = ma.sum_r + mb.sum_r;
    if (!(ma.sum_r > 0.0) || !(mb.sum_r > 0.0)) {
      degenerate = true;
      break;
    }
    a.mean = ma.sum_rx / ma.sum_r;
    b.mean = mb.sum_rx / mb.sum_r;
    double ssa = 0.0;
    double ssb = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double da = values[i] - a.mean;
      const double db = values[i] - b.mean;
      ssa += resp_a[i] * da * da;
      ssb += resp_b[i] * db * db;
    }
    a.var = ssa / ma.sum_r;
    b.var = ssb / mb.sum_r;
    a.weight = ma.sum_r / total;
    b.weight = mb.sum_r / total;
    if (!(a.var > var_floor) || !(b.var > var_floor)) {
      a.var = std::max(a.var, var_floor);
      b.var = std::max(b.var, var_floor);
      degenerate = true;
    }

    const double ll = expect();
    out.log_likelihood_trace.push_back(ll);
    if (degenerate) break;
    // Per-observation change: invariant under affine maps of the data.
    if (std::abs(ll - ll_prev) < config.tolerance * n) {
      out.converged = true;
      break;
    }
    ll_prev = ll;
  }

  out.comp_a = {a.mean, std::sqrt(a.var), a.weight};
  out.comp_b = {b.mean, std::sqrt(b.var), b.weight};
  out.log_likelihood = out.log_likelihood_trace.back();
  // A component may start starved and recover; only the final fit is judged.
  if (degenerate || std::min(a.weight, b.weight) < kMinProportion) {
    out.converged = false;
  }
  return out;
}

std::pair<GaussianClassParams, GaussianClassParams> assign_components(
    const MixtureEstimate& estimate, const GaussianClassParams& train0,
    const GaussianClassParams& train1) {
  const double identity = std::abs(estimate.comp_a.mean - train0.mean) +
                          std::abs(estimate.comp_b.mean - train1.mean);
  const double swapped = std::abs(estimate.comp_b.mean - train0.mean) +
                         std::abs(estimate.comp_a.mean - train1.mean);
  if (swapped < identity) return {estimate.comp_b, estimate.comp_a};
  return {estimate.comp_a, estimate.comp_b};
}

}  // namespace gsd
