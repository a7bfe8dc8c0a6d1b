#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gsd/dataset.hpp"

namespace gsd {

enum class PerturbationKind { step, noise };
enum class FeatureTarget { most_important, least_important };
enum class DriftClass { real_drift, virtual_drift };

std::string_view to_string(PerturbationKind kind);
std::string_view to_string(FeatureTarget target);
std::string_view to_string(DriftClass drift_class);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::noise;
  FeatureTarget target = FeatureTarget::most_important;
  double fraction = 0.25;
  double noise_mean = 1.0;
  double noise_std = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const PerturbationSpec&) const = default;
};

/// Least noise, least step, most noise, most step.
std::vector<PerturbationSpec> standard_scenarios();

/// Row indices of the shuffled 60/20/20 partition.
struct Partition {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> drift;
};

inline constexpr std::size_t kMinProtocolRows = 100;

Partition split_protocol(std::size_t n_rows, std::uint64_t seed);
inline Partition split_protocol(const Dataset& data, std::uint64_t seed) {
  return split_protocol(data.n_rows(), seed);
}

/// The ceil(fraction * d) features taken from the top or the bottom of
/// `ranking` (most important first).
std::vector<std::size_t> perturbed_features(const PerturbationSpec& spec,
                                            std::span<const std::size_t> ranking);

/// Step drift permutes each selected column independently; noise drift adds
/// N(noise_mean, noise_std^2) draws. Everything else is copied untouched.
Dataset induce_drift(const Dataset& data, const PerturbationSpec& spec,
                     std::span<const std::size_t> ranking);

/// Real when the validation-to-drift accuracy drop exceeds the
/// train-to-validation gap; equality counts as virtual.
DriftClass classify_drift_type(double acc_train, double acc_val, double acc_drift);

}  // namespace gsd
