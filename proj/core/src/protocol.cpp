#include "gsd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gsd/error.hpp"
#include "gsd/seed.hpp"

namespace gsd {

std::string_view to_string(PerturbationKind kind) {
  return kind == PerturbationKind::step ? "step" : "noise";
}

std::string_view to_string(FeatureTarget target) {
  return target == FeatureTarget::most_important ? "most" : "least";
}

std::string_view to_string(DriftClass drift_class) {
  return drift_class == DriftClass::real_drift ? "real" : "virtual";
}

std::vector<PerturbationSpec> standard_scenarios() {
  using K = PerturbationKind;
  using T = FeatureTarget;
  return {
      {K::noise, T::least_important},
      {K::step, T::least_important},
      {K::noise, T::most_important},
      {K::step, T::most_important},
  };
}

Partition split_protocol(std::size_t n_rows, std::uint64_t seed) {
  if (n_rows < kMinProtocolRows) {
    throw Error(ErrorCode::insufficient_data,
                fmt::format("protocol split needs at least {} rows, got {}",
                            kMinProtocolRows, n_rows));
  }
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t n_train = n_rows * 60 / 100;
  const std::size_t n_val = n_rows * 20 / 100;
  const auto at = [&](std::size_t i) {
    return order.begin() + static_cast<std::ptrdiff_t>(i);
  };
  Partition p;
  p.train.assign(at(0), at(n_train));
  p.validation.assign(at(n_train), at(n_train + n_val));
  p.drift.assign(at(n_train + n_val), order.end());
  return p;
}

std::vector<std::size_t> perturbed_features(const PerturbationSpec& spec,
                                            std::span<const std::size_t> ranking) {
  if (!(spec.fraction > 0.0 && spec.fraction <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "fraction must lie in (0, 1]");
  }
  const auto d = ranking.size();
  const auto k = std::min<std::size_t>(
      d, static_cast<std::size_t>(std::ceil(spec.fraction * static_cast<double>(d))));
  if (spec.target == FeatureTarget::most_important) {
    return {ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k)};
  }
  return {ranking.end() - static_cast<std::ptrdiff_t>(k), ranking.end()};
}

Dataset induce_drift(const Dataset& data, const PerturbationSpec& spec,
                     std::span<const std::size_t> ranking) {
  if (ranking.size() != data.n_features()) {
    throw Error(ErrorCode::invalid_argument,
                "importance ranking must cover every feature");
  }
  Dataset out = data;
  Rng rng(spec.seed);
  for (const std::size_t f : perturbed_features(spec, ranking)) {
    std::vector<double>& column = out.columns.at(f);
    if (spec.kind == PerturbationKind::step) {
      std::shuffle(column.begin(), column.end(), rng);
    } else {
      std::normal_distribution<double> noise(spec.noise_mean, spec.noise_std);
      for (double& v : column) v += noise(rng);
    }
  }
  return out;
}

DriftClass classify_drift_type(double acc_train, double acc_val, double acc_drift) {
  for (const double a : {acc_train, acc_val, acc_drift}) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "accuracies must lie in [0, 1]");
    }
  }
  // Gaps within rounding of each other are ties.
  constexpr double kTie = 1e-12;
  return (acc_val - acc_drift) - (acc_train - acc_val) > kTie ? DriftClass::real_drift
                                                              : DriftClass::virtual_drift;
}

}  // namespace gsd
