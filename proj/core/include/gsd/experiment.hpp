#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsd/dataset.hpp"
#include "gsd/detector.hpp"
#include "gsd/forest.hpp"
#include "gsd/protocol.hpp"

namespace gsd {

/// Either a named generator ("hyperplane", "waveform") or a CSV file.
struct DatasetSource {
  std::string generator;
  std::uint64_t seed = 0;
  std::size_t n_rows = 10000;
  std::filesystem::path csv_path;
  CsvOptions csv;

  std::string name() const;
};

Dataset materialize(const DatasetSource& source);

struct DetectorConfig {
  std::size_t n_splits = 0;
  double tau = 0.5;
  EmConfig em_config;
  ForestOptions forest;
};

struct Accuracies {
  double train = 0.0;
  double validation = 0.0;
  double drift = 0.0;

  bool operator==(const Accuracies&) const = default;
};

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  DriftClass drift_class = DriftClass::virtual_drift;
  bool detected = false;
  double ratio = 0.0;
  Accuracies accuracies;

  bool operator==(const RunRecord&) const = default;
};

struct ExperimentResult {
  std::string dataset_name;
  PerturbationSpec perturbation;
  /// Majority label over completed runs; ties are virtual.
  DriftClass drift_class = DriftClass::virtual_drift;
  int runs = 0;
  int detections = 0;
  double rate = 0.0;
  /// Means over completed runs.
  Accuracies accuracies;
  std::vector<RunRecord> records;
  /// One message per run that raised an error; such runs are not counted.
  std::vector<std::string> failures;

  bool operator==(const ExperimentResult&) const = default;
};

/// Runs every scenario over `n_runs` shuffles of `data`. Each run trains the
/// reference forest and the detector once and scores an independently
/// perturbed copy of the drift partition per scenario.
std::vector<ExperimentResult> run_benchmark(const Dataset& data,
                                            const std::string& dataset_name,
                                            std::span<const PerturbationSpec> scenarios,
                                            std::size_t n_runs, std::uint64_t seed,
                                            const DetectorConfig& config = {});

ExperimentResult run_experiment(const Dataset& data, const std::string& dataset_name,
                                const PerturbationSpec& spec, std::size_t n_runs,
                                std::uint64_t seed, const DetectorConfig& config = {});

/// Detection rate pooled over every run labeled `drift_class`; nullopt when
/// no run carries that label.
std::optional<double> pooled_rate(std::span<const ExperimentResult> results,
                                  DriftClass drift_class);

void write_report_csv(std::span<const ExperimentResult> results, std::ostream& out);
void write_report_text(std::span<const ExperimentResult> results, std::ostream& out);

}  // namespace gsd
