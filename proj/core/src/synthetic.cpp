#include "gsd/synthetic.hpp"

#include <array>
#include <cmath>
#include <string>

#include "gsd/error.hpp"
#include "gsd/seed.hpp"

namespace gsd {
namespace {

constexpr std::size_t kWaveformSignal = 21;
constexpr std::size_t kWaveformNoise = 19;

// Triangular base waves peaking at positions 6, 14 and 10.
constexpr std::array<std::array<double, kWaveformSignal>, 3> kWaves = {{
    {0, 1, 2, 3, 4, 5, 6, 5, 4, 3, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 3, 4, 5, 6, 5, 4, 3, 2, 1, 0},
    {0, 0, 0, 0, 0, 1, 2, 3, 4, 5, 6, 5, 4, 3, 2, 1, 0, 0, 0, 0, 0},
}};
// Class c mixes waves kPairs[c].
constexpr std::array<std::array<std::size_t, 2>, 3> kPairs = {{{0, 1}, {0, 2}, {1, 2}}};

void require_rows(std::size_t n_rows) {
  if (n_rows == 0) throw Error(ErrorCode::invalid_argument, "n_rows must be >= 1");
}

}  // namespace

std::vector<double> hyperplane_weights(std::uint64_t seed, std::size_t n_features) {
  if (n_features == 0) {
    throw Error(ErrorCode::invalid_argument, "n_features must be >= 1");
  }
  Rng rng(derive_seed(seed, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(n_features);
  double norm = 0.0;
  for (auto& v : w) {
    v = unit(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : w) v /= norm;
  return w;
}

Dataset gen_hyperplane(std::uint64_t seed, std::size_t n_rows, std::size_t n_features) {
  require_rows(n_rows);
  const std::vector<double> w = hyperplane_weights(seed, n_features);
  double threshold = 0.0;
  for (const double v : w) threshold += 0.5 * v;

  Rng rng(derive_seed(seed, 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset data;
  data.columns.assign(n_features, std::vector<double>(n_rows));
  for (std::size_t j = 0; j < n_features; ++j) {
    data.feature_names.push_back("x" + std::to_string(j));
  }
  std::vector<int> labels(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < n_features; ++j) {
      const double x = unit(rng);
      data.columns[j][i] = x;
      dot += w[j] * x;
    }
    labels[i] = dot >= threshold ? 1 : 0;
  }
  data.labels = std::move(labels);
  return data;
}

Dataset gen_waveform(std::uint64_t seed, std::size_t n_rows) {
  require_rows(n_rows);
  Rng rng(derive_seed(seed, 2));
  std::uniform_int_distribution<int> pick_class(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  constexpr std::size_t d = kWaveformSignal + kWaveformNoise;
  Dataset data;
  data.columns.assign(d, std::vector<double>(n_rows));
  for (std::size_t j = 0; j < d; ++j) {
    data.feature_names.push_back("att" + std::to_string(j));
  }
  std::vector<int> classes(n_rows);
  std::vector<int> labels(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const int c = pick_class(rng);
    const double u = unit(rng);
    const auto& first = kWaves[kPairs[static_cast<std::size_t>(c)][0]];
    const auto& second = kWaves[kPairs[static_cast<std::size_t>(c)][1]];
    for (std::size_t j = 0; j < kWaveformSignal; ++j) {
      data.columns[j][i] = u * first[j] + (1.0 - u) * second[j] + noise(rng);
    }
    for (std::size_t j = kWaveformSignal; j < d; ++j) data.columns[j][i] = noise(rng);
    classes[i] = c;
    labels[i] = c == 0 ? 0 : 1;
  }
  data.classes = std::move(classes);
  data.labels = std::move(labels);
  return data;
}

}  // namespace gsd
