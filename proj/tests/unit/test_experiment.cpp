#include <doctest.h>

#include <sstream>

#include "gsd/error.hpp"
#include "gsd/experiment.hpp"

namespace {

gsd::Dataset small_hyperplane() {
  return gsd::materialize({.generator = "hyperplane", .seed = 7, .n_rows = 1500});
}

}  // namespace

TEST_CASE("single run is reproducible") {
  const auto d = small_hyperplane();
  gsd::PerturbationSpec spec;
  spec.kind = gsd::PerturbationKind::noise;
  spec.target = gsd::FeatureTarget::most_important;
  const auto a = gsd::run_experiment(d, "hyperplane", spec, 1, 42);
  const auto b = gsd::run_experiment(d, "hyperplane", spec, 1, 42);
  CHECK(a == b);
  CHECK(a.runs == 1);
  CHECK(a.records.size() == 1);
  CHECK(a.failures.empty());
  CHECK(a.rate == static_cast<double>(a.detections));
}

TEST_CASE("benchmark rows") {
  const auto d = small_hyperplane();
  const auto scenarios = gsd::standard_scenarios();
  const auto results = gsd::run_benchmark(d, "hyperplane", scenarios, 3, 7);
  REQUIRE(results.size() == 4);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    CHECK(r.perturbation.kind == scenarios[i].kind);
    CHECK(r.runs == 3);
    CHECK(r.rate == doctest::Approx(static_cast<double>(r.detections) / 3.0));
    CHECK(r.accuracies.train >= r.accuracies.validation - 0.1);
  }
  // Runs share the partition and the reference forest across scenarios.
  CHECK(results[0].records[1].accuracies.train == results[3].records[1].accuracies.train);
  CHECK(results[0].records[1].accuracies.validation ==
        results[3].records[1].accuracies.validation);

  // run_experiment is the one-scenario slice of the benchmark.
  const auto single = gsd::run_experiment(d, "hyperplane", scenarios[2], 3, 7);
  CHECK(single == results[2]);

  // Step drift only reorders values inside columns, so the verdicts for step
  // on either end of the ranking match run for run.
  for (int run = 0; run < 3; ++run) {
    CHECK(results[1].records[run].ratio == results[3].records[run].ratio);
  }

  const auto real = gsd::pooled_rate(results, gsd::DriftClass::real_drift);
  const auto virt = gsd::pooled_rate(results, gsd::DriftClass::virtual_drift);
  CHECK((real || virt));

  std::ostringstream csv;
  gsd::write_report_csv(results, csv);
  const std::string text = csv.str();
  CHECK(text.rfind("dataset,kind,target,drift_class,runs,detections,rate,acc_train,acc_val,acc_drift\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  std::ostringstream table;
  gsd::write_report_text(results, table);
  CHECK(table.str().find("hyperplane") != std::string::npos);
}

TEST_CASE("failing runs are reported") {
  gsd::Dataset d = small_hyperplane();
  for (auto& c : d.columns) std::fill(c.begin(), c.end(), 0.5);
  const auto r = gsd::run_experiment(d, "flat", gsd::standard_scenarios()[0], 2, 1);
  CHECK(r.runs == 0);
  CHECK(r.failures.size() == 2);
  CHECK(r.rate == 0.0);
}

TEST_CASE("sources") {
  CHECK(gsd::materialize({.generator = "waveform", .seed = 1, .n_rows = 200}).n_features() == 40);
  CHECK_THROWS_AS(gsd::materialize({.generator = "sea"}), gsd::Error);
  CHECK(gsd::DatasetSource{.generator = "hyperplane"}.name() == "hyperplane");
}
