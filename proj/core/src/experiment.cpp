#include "gsd/experiment.hpp"

#include <ostream>

#include <fmt/format.h>

#include "gsd/error.hpp"
#include "gsd/seed.hpp"
#include "gsd/synthetic.hpp"

namespace gsd {
namespace {

enum Stream : std::uint64_t {
  kPartition = 1,
  kForest = 2,
  kDetector = 3,
  kPerturbation = 16,
};

Dataset without_labels(Dataset data) {
  data.labels.reset();
  data.classes.reset();
  return data;
}

}  // namespace

std::string DatasetSource::name() const {
  if (!generator.empty()) return generator;
  return csv_path.stem().string();
}

Dataset materialize(const DatasetSource& source) {
  if (source.generator == "hyperplane") return gen_hyperplane(source.seed, source.n_rows);
  if (source.generator == "waveform") return gen_waveform(source.seed, source.n_rows);
  if (!source.generator.empty()) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("unknown generator '{}'", source.generator));
  }
  return load_csv(source.csv_path, source.csv);
}

std::vector<ExperimentResult> run_benchmark(const Dataset& data,
                                            const std::string& dataset_name,
                                            std::span<const PerturbationSpec> scenarios,
                                            std::size_t n_runs, std::uint64_t seed,
                                            const DetectorConfig& config) {
  data.validate();
  if (!data.labels) {
    throw Error(ErrorCode::invalid_argument, "benchmark data needs labels");
  }
  std::vector<ExperimentResult> results(scenarios.size());
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    results[s].dataset_name = dataset_name;
    results[s].perturbation = scenarios[s];
  }

  for (std::size_t run = 0; run < n_runs; ++run) {
    const std::uint64_t run_seed = derive_seed(seed, run);
    try {
      const Partition part = split_protocol(data, derive_seed(run_seed, kPartition));
      const Dataset train_part = data.subset(part.train);
      const Dataset val_part = data.subset(part.validation);
      const Dataset drift_part = data.subset(part.drift);

      const RandomForest forest =
          RandomForest::fit(train_part, reference_target(train_part), config.forest,
                            derive_seed(run_seed, kForest));
      const std::vector<std::size_t> ranking = forest.ranking();
      const double acc_train = forest.accuracy(train_part, reference_target(train_part));
      const double acc_val = forest.accuracy(val_part, reference_target(val_part));

      TrainOptions options;
      options.n_splits = config.n_splits;
      options.tau = config.tau;
      options.em_config = config.em_config;
      options.seed = derive_seed(run_seed, kDetector);
      const GsdModel model = train(train_part, options);

      for (std::size_t s = 0; s < scenarios.size(); ++s) {
        PerturbationSpec spec = scenarios[s];
        const std::uint64_t stream = kPerturbation + 2 * static_cast<std::uint64_t>(spec.kind) +
                                     static_cast<std::uint64_t>(spec.target);
        spec.seed = derive_seed(derive_seed(run_seed, stream), spec.seed);
        const Dataset drifted = induce_drift(drift_part, spec, ranking);
        const double acc_drift = forest.accuracy(drifted, reference_target(drifted));
        const DriftReport report = detect(model, without_labels(drifted));

        RunRecord record;
        record.run = run;
        record.seed = run_seed;
        record.drift_class = classify_drift_type(acc_train, acc_val, acc_drift);
        record.detected = report.drift;
        record.ratio = report.ratio;
        record.accuracies = {acc_train, acc_val, acc_drift};
        results[s].records.push_back(record);
      }
    } catch (const Error& e) {
      for (auto& r : results) {
        r.failures.push_back(fmt::format("run {}: {}", run, e.what()));
      }
    }
  }

  for (auto& r : results) {
    r.runs = static_cast<int>(r.records.size());
    int real = 0;
    for (const RunRecord& rec : r.records) {
      r.detections += rec.detected ? 1 : 0;
      real += rec.drift_class == DriftClass::real_drift ? 1 : 0;
      r.accuracies.train += rec.accuracies.train;
      r.accuracies.validation += rec.accuracies.validation;
      r.accuracies.drift += rec.accuracies.drift;
    }
    if (r.runs > 0) {
      const double n = r.runs;
      r.rate = r.detections / n;
      r.accuracies.train /= n;
      r.accuracies.validation /= n;
      r.accuracies.drift /= n;
    }
    r.drift_class = 2 * real > r.runs ? DriftClass::real_drift : DriftClass::virtual_drift;
  }
  return results;
}

ExperimentResult run_experiment(const Dataset& data, const std::string& dataset_name,
                                const PerturbationSpec& spec, std::size_t n_runs,
                                std::uint64_t seed, const DetectorConfig& config) {
  return run_benchmark(data, dataset_name, std::span(&spec, 1), n_runs, seed, config)
      .front();
}

std::optional<double> pooled_rate(std::span<const ExperimentResult> results,
                                  DriftClass drift_class) {
  int runs = 0;
  int detections = 0;
  for (const auto& r : results) {
    for (const auto& rec : r.records) {
      if (rec.drift_class != drift_class) continue;
      ++runs;
      detections += rec.detected ? 1 : 0;
    }
  }
  if (runs == 0) return std::nullopt;
  return static_cast<double>(detections) / runs;
}

void write_report_csv(std::span<const ExperimentResult> results, std::ostream& out) {
  out << "dataset,kind,target,drift_class,runs,detections,rate,acc_train,acc_val,"
         "acc_drift\n";
  for (const auto& r : results) {
    out << fmt::format("{},{},{},{},{},{},{:.4f},{:.4f},{:.4f},{:.4f}\n",
                       r.dataset_name, to_string(r.perturbation.kind),
                       to_string(r.perturbation.target), to_string(r.drift_class),
                       r.runs, r.detections, r.rate, r.accuracies.train,
                       r.accuracies.validation, r.accuracies.drift);
  }
}

void write_report_text(std::span<const ExperimentResult> results, std::ostream& out) {
  out << fmt::format("{:<12} {:<14} {:<8} {:>5} {:>5} {:>6} {:>7} {:>7} {:>7}\n",
                     "dataset", "scenario", "class", "runs", "det", "rate", "train",
                     "valid", "drift");
  for (const auto& r : results) {
    const std::string scenario = fmt::format("{} {}", to_string(r.perturbation.target),
                                             to_string(r.perturbation.kind));
    out << fmt::format("{:<12} {:<14} {:<8} {:>5} {:>5} {:>6.2f} {:>7.2f} {:>7.2f} {:>7.2f}\n",
                       r.dataset_name, scenario, to_string(r.drift_class), r.runs,
                       r.detections, r.rate, r.accuracies.train,
                       r.accuracies.validation, r.accuracies.drift);
    for (const auto& f : r.failures) out << "  ! " << f << '\n';
  }
  if (const auto tpr = pooled_rate(results, DriftClass::real_drift)) {
    out << fmt::format("real drift detection rate (TPR):     {:.2f}\n", *tpr);
  }
  if (const auto fpr = pooled_rate(results, DriftClass::virtual_drift)) {
    out << fmt::format("virtual drift detection rate (FPR):  {:.2f}\n", *fpr);
  }
}

}  // namespace gsd
