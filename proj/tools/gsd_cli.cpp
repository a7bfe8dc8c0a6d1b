#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gsd/dataset.hpp"
#include "gsd/detector.hpp"
#include "gsd/error.hpp"
#include "gsd/experiment.hpp"
#include "gsd/model_io.hpp"
#include "gsd/synthetic.hpp"

namespace {

// Exit codes.
constexpr int kNoDrift = 0;
constexpr int kDrift = 1;
constexpr int kFailure = 2;
constexpr int kSchemaMismatch = 3;
constexpr int kUsage = 64;

struct Config {
  std::string input;
  std::string model;
  std::string label_column;
  bool drop_non_numeric = false;
  std::size_t n_splits = 0;
  double tau = 0.5;
  std::uint64_t seed = 0;
  std::size_t runs = 10;
  std::string kind;
  std::string target;
  std::string out;
  std::string format = "text";
  std::string dataset;
  std::size_t rows = 10000;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw gsd::Error(gsd::ErrorCode::io_error, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

gsd::CsvOptions csv_options(const Config& c) {
  return {c.label_column, c.drop_non_numeric};
}

int cmd_train(const Config& c) {
  const gsd::Dataset data = gsd::load_csv(c.input, csv_options(c));
  if (!data.has_labels()) {
    throw gsd::Error(gsd::ErrorCode::missing_label_column,
                     "training needs --label-column");
  }
  gsd::TrainOptions options;
  options.n_splits = c.n_splits;
  options.tau = c.tau;
  options.seed = c.seed;
  const gsd::GsdModel model = gsd::train(data, options);
  gsd::save_model(model, c.model);

  fmt::print("model: {}\n", c.model);
  fmt::print("splits: {}  features: {}  tau: {}\n", model.splits.size(),
             model.features().size(), model.tau);
  fmt::print("{:>5}  {:<16} {:>14} {:>12}\n", "split", "feature", "alpha", "error");
  for (std::size_t i = 0; i < model.splits.size(); ++i) {
    const auto& s = model.splits[i];
    fmt::print("{:>5}  {:<16} {:>14.6g} {:>12.6g}\n", i, model.feature_names[s.feature_index],
               s.alpha, s.error);
  }
  fmt::print("{:<16} {:>14}\n", "feature", "beta");
  for (const std::size_t f : model.features()) {
    fmt::print("{:<16} {:>14.6g}{}\n", model.feature_names[f], model.beta(f),
               model.calibration.fallback.contains(f) ? "  (floor)" : "");
  }
  return kNoDrift;
}

void print_report(const gsd::GsdModel& model, const gsd::DriftReport& r,
                  const std::string& format, std::ostream& out) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.6g}", *v) : std::string("-");
  };
  if (format == "csv") {
    fmt::print(out, "split,feature,alpha,alpha_hat,delta,beta,exceeded,em_converged\n");
    for (std::size_t i = 0; i < r.per_split.size(); ++i) {
      const auto& s = r.per_split[i];
      fmt::print(out, "{},{},{:.17g},{},{},{:.17g},{},{}\n", i,
                 model.feature_names[s.feature_index], s.alpha_train,
                 s.alpha_hat ? fmt::format("{:.17g}", *s.alpha_hat) : "",
                 s.delta ? fmt::format("{:.17g}", *s.delta) : "", model.beta(s.feature_index),
                 s.exceeded ? 1 : 0, s.em_converged ? 1 : 0);
    }
    return;
  }
  fmt::print(out, "drift: {}\n", r.drift ? "yes" : "no");
  fmt::print(out, "gamma: {}  evaluated: {}  excluded: {}  splits: {}\n", r.gamma, r.evaluated,
             r.excluded(), r.per_split.size());
  fmt::print(out, "ratio: {:.4f}  tau: {}\n", r.ratio, r.tau);
  fmt::print(out, "{:>5}  {:<16} {:>12} {:>12} {:>12} {:>12}  {}\n", "split", "feature", "alpha",
             "alpha_hat", "delta", "beta", "flag");
  for (std::size_t i = 0; i < r.per_split.size(); ++i) {
    const auto& s = r.per_split[i];
    const char* flag = !s.alpha_hat ? "excluded" : s.exceeded ? "drift" : "";
    fmt::print(out, "{:>5}  {:<16} {:>12.6g} {:>12} {:>12} {:>12.6g}  {}\n", i,
               model.feature_names[s.feature_index], s.alpha_train, opt(s.alpha_hat),
               opt(s.delta), model.beta(s.feature_index), flag);
  }
}

int cmd_detect(const Config& c, bool tau_given) {
  gsd::GsdModel model = gsd::load_model(c.model);
  if (tau_given) model.tau = c.tau;
  const gsd::Dataset batch = gsd::load_csv(c.input, csv_options(c));
  const gsd::DriftReport report = gsd::detect(model, batch);
  Output out(c.out);
  print_report(model, report, c.format, out.stream());
  return report.drift ? kDrift : kNoDrift;
}

gsd::DatasetSource source_of(const Config& c) {
  gsd::DatasetSource source;
  if (!c.dataset.empty()) {
    source.generator = c.dataset;
    source.seed = c.seed;
    source.n_rows = c.rows;
  } else {
    source.csv_path = c.input;
    source.csv = csv_options(c);
  }
  return source;
}

int cmd_bench(const Config& c) {
  const gsd::DatasetSource source = source_of(c);
  const gsd::Dataset data = gsd::materialize(source);
  std::vector<gsd::PerturbationSpec> scenarios;
  for (const auto& s : gsd::standard_scenarios()) {
    if (!c.kind.empty() && gsd::to_string(s.kind) != c.kind) continue;
    if (!c.target.empty() && c.target != (s.target == gsd::FeatureTarget::most_important
                                              ? "most"
                                              : "least")) {
      continue;
    }
    scenarios.push_back(s);
  }
  gsd::DetectorConfig config;
  config.n_splits = c.n_splits;
  config.tau = c.tau;
  const auto results = gsd::run_benchmark(data, source.name(), scenarios, c.runs, c.seed, config);
  Output out(c.out);
  if (c.format == "csv") {
    gsd::write_report_csv(results, out.stream());
  } else {
    gsd::write_report_text(results, out.stream());
  }
  for (const auto& r : results) {
    for (const auto& f : r.failures) fmt::print(stderr, "warning: {}\n", f);
  }
  return kNoDrift;
}

int cmd_gen(const Config& c) {
  gsd::DatasetSource source;
  source.generator = c.dataset;
  source.seed = c.seed;
  source.n_rows = c.rows;
  const gsd::Dataset data = gsd::materialize(source);
  Output out(c.out);
  gsd::write_csv(data, out.stream());
  return kNoDrift;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian Split Detector: batch concept-drift detection"};
  app.require_subcommand(1);
  Config c;

  const auto common_csv = [&](CLI::App* sub) {
    sub->add_option("--label-column", c.label_column, "Label column name or zero-based index");
    sub->add_flag("--drop-non-numeric", c.drop_non_numeric, "Drop text columns instead of failing");
  };
  const auto format_option = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "Report format")
        ->check(CLI::IsMember({"csv", "text"}))
        ->capture_default_str();
    sub->add_option("--out", c.out, "Write output here instead of stdout");
  };
  const auto tau_check = CLI::Validator(
      [](std::string& s) -> std::string {
        double v = 0.0;
        try {
          v = std::stod(s);
        } catch (const std::exception&) {
          return "tau must be a number";
        }
        return v > 0.0 && v <= 1.0 ? "" : "tau must lie in (0, 1]";
      },
      "(0,1]");
  const auto splits_check = CLI::Range(std::size_t{1}, std::size_t{100000});

  auto* train = app.add_subcommand("train", "Fit a detector on a labeled CSV");
  train->add_option("--input", c.input, "Labeled training CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--model", c.model, "Model file to write")->required();
  common_csv(train);
  train->add_option("--n-splits", c.n_splits, "Ensemble size (default max(10, d))")
      ->check(splits_check);
  train->add_option("--tau", c.tau, "Drift ratio threshold")->check(tau_check)->capture_default_str();
  train->add_option("--seed", c.seed, "Random seed")->capture_default_str();

  auto* detect = app.add_subcommand("detect", "Test an unlabeled batch for drift");
  detect->add_option("--model", c.model, "Model file")->required()->check(CLI::ExistingFile);
  detect->add_option("--input", c.input, "Batch CSV")->required()->check(CLI::ExistingFile);
  common_csv(detect);
  auto* detect_tau = detect->add_option("--tau", c.tau, "Override the model's threshold")->check(tau_check);
  format_option(detect);

  auto* bench = app.add_subcommand("bench", "Run the perturbation scenarios");
  auto* bench_dataset = bench->add_option("--dataset", c.dataset, "Generator")
                            ->check(CLI::IsMember({"hyperplane", "waveform"}));
  auto* bench_input = bench->add_option("--input", c.input, "Labeled CSV")->check(CLI::ExistingFile);
  bench_dataset->excludes(bench_input);
  common_csv(bench);
  bench->add_option("--rows", c.rows, "Generated rows")->check(CLI::Range(100, 100000000))->capture_default_str();
  bench->add_option("--runs", c.runs, "Runs per scenario")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  bench->add_option("--n-splits", c.n_splits, "Ensemble size (default max(10, d))")
      ->check(splits_check);
  bench->add_option("--tau", c.tau, "Drift ratio threshold")->check(tau_check)->capture_default_str();
  bench->add_option("--kind", c.kind, "Only this perturbation kind")->check(CLI::IsMember({"step", "noise"}));
  bench->add_option("--target", c.target, "Only this feature target")->check(CLI::IsMember({"most", "least"}));
  format_option(bench);

  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset as CSV");
  gen->add_option("--dataset", c.dataset, "Generator")
      ->required()
      ->check(CLI::IsMember({"hyperplane", "waveform"}));
  gen->add_option("--rows", c.rows, "Rows")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--seed", c.seed, "Seed")->capture_default_str();
  gen->add_option("--out", c.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
    if (bench->parsed() && c.dataset.empty() && c.input.empty()) {
      throw CLI::RequiredError("bench needs --dataset or --input");
    }
    if (bench->parsed() && !c.input.empty() && c.label_column.empty()) {
      throw CLI::RequiredError("bench on a CSV needs --label-column");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (train->parsed()) return cmd_train(c);
    if (detect->parsed()) return cmd_detect(c, detect_tau->count() > 0);
    if (bench->parsed()) return cmd_bench(c);
    return cmd_gen(c);
  } catch (const gsd::ParseError& e) {
    fmt::print(stderr, "error: {} (line {}, column {})\n", e.what(), e.line(), e.column());
    return kFailure;
  } catch (const gsd::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return e.code() == gsd::ErrorCode::schema_mismatch ? kSchemaMismatch : kFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFailure;
  }
}
