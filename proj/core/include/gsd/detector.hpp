#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsd/dataset.hpp"
#include "gsd/em.hpp"
#include "gsd/gaussian.hpp"

namespace gsd {

/// Single-feature stump whose threshold is the minimal-error crossing of the
/// two weighted class densities.
struct BayesianSplit {
  std::size_t feature_index = 0;
  double alpha = 0.0;
  double error = 0.0;
  GaussianClassParams class0;
  GaussianClassParams class1;

  bool operator==(const BayesianSplit&) const = default;
};

/// Per-feature tolerance on boundary movement.
struct BetaCalibration {
  std::map<std::size_t, double> beta;
  /// Features whose beta fell back to the floor because no held-out EM fit
  /// converged to a boundary.
  std::set<std::size_t> fallback;
  /// Number of 75/25 hold-out draws beta was maximized over.
  int rounds = 1;

  bool operator==(const BetaCalibration&) const = default;
};

struct GsdModel {
  std::vector<BayesianSplit> splits;
  BetaCalibration calibration;
  double tau = 0.5;
  EmConfig em_config;
  std::vector<std::string> feature_names;
  std::uint64_t seed = 0;

  /// Distinct feature indices used by the ensemble, ascending.
  std::vector<std::size_t> features() const;
  double beta(std::size_t feature) const { return calibration.beta.at(feature); }

  void validate() const;

  bool operator==(const GsdModel&) const = default;
};

struct SplitOutcome {
  std::size_t feature_index = 0;
  double alpha_train = 0.0;
  std::optional<double> alpha_hat;
  std::optional<double> delta;
  bool exceeded = false;
  bool em_converged = false;

  bool operator==(const SplitOutcome&) const = default;
};

struct DriftReport {
  std::vector<SplitOutcome> per_split;
  /// Splits whose boundary moved by at least beta.
  int gamma = 0;
  /// Splits with a usable re-estimated boundary.
  int evaluated = 0;
  /// gamma over the full ensemble size; excluded splits count as stable.
  double ratio = 0.0;
  double tau = 0.5;
  bool drift = false;

  int excluded() const { return static_cast<int>(per_split.size()) - evaluated; }

  bool operator==(const DriftReport&) const = default;
};

struct TrainOptions {
  /// 0 selects max(10, feature count).
  std::size_t n_splits = 0;
  double tau = 0.5;
  EmConfig em_config;
  std::uint64_t seed = 0;
  int calibration_rounds = 19;
};

/// Per-class sample mean, sample standard deviation and class share.
/// Standard deviations are floored at 1e-9 times the column range. Needs at
/// least 5 rows of each class.
std::pair<GaussianClassParams, GaussianClassParams> fit_class_gaussians(
    std::span<const double> column, std::span<const int> labels);

/// Best split over `candidates` using only `rows` of `data`. Candidates with
/// too few samples per class or with no boundary are skipped.
std::optional<BayesianSplit> build_split(const Dataset& data,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidates);

/// Row indices (fit, hold-out) of one seeded 75/25 calibration draw.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> calibration_split(
    std::size_t n_rows, std::uint64_t seed);

/// Seeded 75/25 hold-out: each round computes |alpha_i - alpha_hat_i| where
/// alpha_i is the labeled boundary on the 75% part and alpha_hat_i the EM
/// boundary on the remaining 25%. beta_i is the largest value over `rounds`
/// independent shuffles, floored at 1e-3 times the feature's IQR on the
/// first round's 75% part.
BetaCalibration calibrate_beta(const Dataset& data,
                               std::span<const std::size_t> features,
                               const EmConfig& em_config, std::uint64_t seed,
                               int rounds = 1);

GsdModel train(const Dataset& data, const TrainOptions& options);

/// Minimum batch size accepted by detect.
inline constexpr std::size_t kMinBatchRows = 20;

/// Re-estimates every monitored boundary on an unlabeled batch and counts
/// the splits whose boundary moved by at least beta. Batch columns are
/// matched to the model by feature name.
DriftReport detect(const GsdModel& model, const Dataset& batch);

}  // namespace gsd
