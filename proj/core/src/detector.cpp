#include "gsd/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "gsd/error.hpp"
#include "gsd/seed.hpp"

namespace gsd {
namespace {

constexpr std::size_t kMinClassRows = 5;
constexpr std::size_t kMinTrainRows = 40;
constexpr double kStdFloorScale = 1e-9;
constexpr double kBetaFloorScale = 1e-3;
constexpr double kCalibrationShare = 0.75;
constexpr std::uint64_t kCalibrationStream = 0xCA1;

std::vector<double> gather(std::span<const double> column,
                           std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const std::size_t r : rows) out.push_back(column[r]);
  return out;
}

std::vector<int> gather(std::span<const int> labels,
                        std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

// Linear-interpolation quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double interquartile_range(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return quantile(values, 0.75) - quantile(values, 0.25);
}

const std::vector<int>& require_labels(const Dataset& data) {
  if (!data.labels) {
    throw Error(ErrorCode::invalid_argument, "dataset has no labels");
  }
  return *data.labels;
}

// Boundary re-estimated on unlabeled values, warm-started from `reference`.
struct Reestimate {
  std::optional<double> alpha;
  bool converged = false;
};

// Moments of the values below and above the class-0 quantile.
std::optional<std::pair<GaussianClassParams, GaussianClassParams>> quantile_start(
    std::span<const double> values, double p0) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto cut = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(p0 * static_cast<double>(n))), 2, n - 2);
  const auto moments = [](std::span<const double> part, double weight)
      -> std::optional<GaussianClassParams> {
    double mean = 0.0;
    for (const double x : part) mean += x;
    mean /= static_cast<double>(part.size());
    double var = 0.0;
    for (const double x : part) var += (x - mean) * (x - mean);
    var /= static_cast<double>(part.size());
    if (!(var > 0.0)) return std::nullopt;
    return GaussianClassParams{mean, std::sqrt(var), weight};
  };
  const auto lo = moments(std::span(sorted).first(cut), p0);
  const auto hi = moments(std::span(sorted).subspan(cut), 1.0 - p0);
  if (!lo || !hi) return std::nullopt;
  return std::pair{*lo, *hi};
}

Reestimate reestimate_boundary(std::span<const double> values,
                               const GaussianClassParams& ref0,
                               const GaussianClassParams& ref1,
                               const EmConfig& config) {
  Reestimate out;
  MixtureEstimate fit;
  try {
    fit = em_fit(values, {ref0, ref1}, config);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degenerate_data) return out;
    throw;
  }
  // A warm start far from the batch can starve one component; restart once
  // from the batch's own quantiles, ordered like the reference classes.
  if (!fit.converged) {
    const double p0 = ref0.proportion / (ref0.proportion + ref1.proportion);
    const bool ascending = ref0.mean <= ref1.mean;
    if (auto start = quantile_start(values, ascending ? p0 : 1.0 - p0)) {
      if (!ascending) std::swap(start->first, start->second);
      const MixtureEstimate retry = em_fit(values, *start, config);
      if (retry.converged) fit = retry;
    }
  }
  out.converged = fit.converged;
  if (!fit.converged) return out;
  const auto [c0, c1] = assign_components(fit, ref0, ref1);
  if (const auto boundary = select_boundary(c0, c1)) out.alpha = boundary->alpha;
  return out;
}

}  // namespace

std::vector<std::size_t> GsdModel::features() const {
  std::vector<std::size_t> out;
  for (const auto& s : splits) out.push_back(s.feature_index);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void GsdModel::validate() const {
  if (splits.empty()) {
    throw Error(ErrorCode::invalid_argument, "model has no splits");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "tau must lie in (0, 1]");
  }
  gsd::validate(em_config);
  for (const auto& s : splits) {
    if (s.feature_index >= feature_names.size()) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("split uses feature {} but the model names only {}",
                              s.feature_index, feature_names.size()));
    }
    if (!calibration.beta.contains(s.feature_index)) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("no beta for feature {}", s.feature_index));
    }
    gsd::validate(s.class0);
    gsd::validate(s.class1);
  }
}

std::pair<GaussianClassParams, GaussianClassParams> fit_class_gaussians(
    std::span<const double> column, std::span<const int> labels) {
  if (column.size() != labels.size()) {
    throw Error(ErrorCode::invalid_argument,
                "column and labels differ in length");
  }
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < column.size(); ++i) {
    const int y = labels[i];
    if (y != 0 && y != 1) {
      throw Error(ErrorCode::non_binary_label, "labels must be 0 or 1");
    }
    sum[y] += column[i];
    ++count[y];
    lo = std::min(lo, column[i]);
    hi = std::max(hi, column[i]);
  }
  if (count[0] < kMinClassRows || count[1] < kMinClassRows) {
    throw Error(ErrorCode::insufficient_class_data,
                fmt::format("need {} samples per class, got {} and {}",
                            kMinClassRows, count[0], count[1]));
  }
  const double mean[2] = {sum[0] / static_cast<double>(count[0]),
                          sum[1] / static_cast<double>(count[1])};
  double ss[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < column.size(); ++i) {
    const double d = column[i] - mean[labels[i]];
    ss[labels[i]] += d * d;
  }
  const double range = hi - lo;
  const double floor = kStdFloorScale * (range > 0.0 ? range : 1.0);
  const double n = static_cast<double>(column.size());
  const auto make = [&](int c) {
    const double sd = std::sqrt(ss[c] / static_cast<double>(count[c] - 1));
    return GaussianClassParams{mean[c], std::max(sd, floor),
                               static_cast<double>(count[c]) / n};
  };
  return {make(0), make(1)};
}

std::optional<BayesianSplit> build_split(const Dataset& data,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::invalid_argument, "no candidate features");
  }
  const std::vector<int> labels = gather(require_labels(data), rows);
  std::optional<BayesianSplit> best;
  for (const std::size_t f : candidates) {
    if (f >= data.n_features()) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("candidate feature {} out of range", f));
    }
    const std::vector<double> column = gather(data.columns[f], rows);
    std::pair<GaussianClassParams, GaussianClassParams> params;
    try {
      params = fit_class_gaussians(column, labels);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::insufficient_class_data) continue;
      throw;
    }
    const auto boundary = select_boundary(params.first, params.second);
    if (!boundary) continue;
    if (!best || boundary->error < best->error) {
      best = BayesianSplit{f, boundary->alpha, boundary->error, params.first,
                           params.second};
    }
  }
  return best;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> calibration_split(
    std::size_t n_rows, std::uint64_t seed) {
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_fit = static_cast<std::size_t>(
      std::floor(kCalibrationShare * static_cast<double>(n_rows)));
  std::vector<std::size_t> hold(order.begin() + static_cast<std::ptrdiff_t>(n_fit),
                                order.end());
  order.resize(n_fit);
  return {std::move(order), std::move(hold)};
}

BetaCalibration calibrate_beta(const Dataset& data,
                               std::span<const std::size_t> features,
                               const EmConfig& em_config, std::uint64_t seed,
                               int rounds) {
  if (features.empty()) {
    throw Error(ErrorCode::invalid_argument, "no features to calibrate");
  }
  if (rounds < 1) {
    throw Error(ErrorCode::invalid_argument, "calibration needs at least one round");
  }
  const std::vector<int>& labels = require_labels(data);

  BetaCalibration out;
  out.rounds = rounds;
  std::map<std::size_t, std::optional<double>> widest;
  for (int round = 0; round < rounds; ++round) {
    const auto [fit_rows, hold_rows] = calibration_split(
        data.n_rows(),
        round == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(round)));
    const std::vector<int> fit_labels = gather(labels, fit_rows);

    for (const std::size_t f : features) {
      const std::vector<double> fit_column = gather(data.columns.at(f), fit_rows);
      if (round == 0) {
        out.beta[f] = kBetaFloorScale * interquartile_range(fit_column);
        widest[f] = std::nullopt;
      }
      std::pair<GaussianClassParams, GaussianClassParams> params;
      try {
        params = fit_class_gaussians(fit_column, fit_labels);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::insufficient_class_data) throw;
        continue;
      }
      const auto boundary = select_boundary(params.first, params.second);
      if (!boundary) continue;
      const std::vector<double> hold_column = gather(data.columns[f], hold_rows);
      Reestimate held;
      try {
        held = reestimate_boundary(hold_column, params.first, params.second,
                                   em_config);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::insufficient_data) throw;
      }
      if (!held.alpha) continue;
      const double delta = std::abs(boundary->alpha - *held.alpha);
      widest[f] = std::max(widest[f].value_or(0.0), delta);
    }
  }
  for (const std::size_t f : features) {
    if (widest[f]) {
      out.beta[f] = std::max(*widest[f], out.beta[f]);
    } else {
      out.fallback.insert(f);
    }
  }
  return out;
}

GsdModel train(const Dataset& data, const TrainOptions& options) {
  data.validate();
  require_labels(data);
  if (data.n_rows() < kMinTrainRows) {
    throw Error(ErrorCode::insufficient_data,
                fmt::format("training needs at least {} rows, got {}",
                            kMinTrainRows, data.n_rows()));
  }
  if (data.n_features() == 0) {
    throw Error(ErrorCode::insufficient_data, "training data has no features");
  }
  if (!(options.tau > 0.0 && options.tau <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "tau must lie in (0, 1]");
  }
  validate(options.em_config);

  const std::size_t d = data.n_features();
  const std::size_t n = data.n_rows();
  const std::size_t n_splits =
      options.n_splits ? options.n_splits : std::max<std::size_t>(10, d);
  const auto subset_size = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(d))));

  GsdModel model;
  model.tau = options.tau;
  model.em_config = options.em_config;
  model.feature_names = data.feature_names;
  model.seed = options.seed;

  std::vector<std::size_t> rows(n);
  std::vector<std::size_t> pool(d);
  for (std::size_t s = 0; s < n_splits; ++s) {
    Rng rng(derive_seed(options.seed, s));
    std::uniform_int_distribution<std::size_t> pick_row(0, n - 1);
    for (auto& r : rows) r = pick_row(rng);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < subset_size; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, d - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<std::size_t> candidates(pool.begin(),
                                        pool.begin() + static_cast<std::ptrdiff_t>(subset_size));
    std::sort(candidates.begin(), candidates.end());
    if (auto split = build_split(data, rows, candidates)) {
      model.splits.push_back(*split);
    }
  }
  if (model.splits.empty()) {
    throw Error(ErrorCode::untrainable_dataset,
                "no feature yields a class boundary in any split");
  }
  const std::vector<std::size_t> used = model.features();
  model.calibration =
      calibrate_beta(data, used, options.em_config,
                     derive_seed(options.seed, kCalibrationStream),
                     options.calibration_rounds);
  return model;
}

DriftReport detect(const GsdModel& model, const Dataset& batch) {
  model.validate();
  if (batch.n_rows() < kMinBatchRows) {
    throw Error(ErrorCode::insufficient_batch,
                fmt::format("batch needs at least {} rows, got {}",
                            kMinBatchRows, batch.n_rows()));
  }

  // One EM fit per monitored feature, shared by every split on it.
  std::map<std::size_t, Reestimate> fits;
  for (const std::size_t f : model.features()) {
    const std::string& name = model.feature_names[f];
    const auto column = batch.feature_index(name);
    if (!column) {
      throw Error(ErrorCode::schema_mismatch,
                  fmt::format("batch lacks model feature '{}'", name));
    }
    const auto& ref = *std::find_if(
        model.splits.begin(), model.splits.end(),
        [f](const BayesianSplit& s) { return s.feature_index == f; });
    fits[f] = reestimate_boundary(batch.columns[*column], ref.class0, ref.class1,
                                  model.em_config);
  }

  DriftReport report;
  report.tau = model.tau;
  for (const auto& split : model.splits) {
    const Reestimate& fit = fits.at(split.feature_index);
    SplitOutcome out;
    out.feature_index = split.feature_index;
    out.alpha_train = split.alpha;
    out.em_converged = fit.converged;
    if (fit.alpha) {
      out.alpha_hat = fit.alpha;
      out.delta = std::abs(split.alpha - *fit.alpha);
      out.exceeded = *out.delta >= model.beta(split.feature_index);
      ++report.evaluated;
      if (out.exceeded) ++report.gamma;
    }
    report.per_split.push_back(out);
  }
  report.ratio = static_cast<double>(report.gamma) /
                 static_cast<double>(model.splits.size());
  report.drift = report.ratio >= model.tau;
  return report;
}

}  // namespace gsd
