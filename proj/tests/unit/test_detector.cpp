#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gsd/detector.hpp"
#include "gsd/error.hpp"
#include "support/oracles.hpp"

using gsd::Dataset;
using gsd::testing::two_class_gaussian;

namespace {

std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> rows(d.n_rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

gsd::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const gsd::Error& e) {
    return e.code();
  }
  FAIL("expected gsd::Error");
  return gsd::ErrorCode::io_error;
}

// Three informative Gaussian features with different separations.
Dataset gaussian_three(std::uint64_t seed, std::size_t n) {
  return two_class_gaussian(seed, n, 0.5, {{-1, 1}, {0, 3}, {5, 6.5}},
                            {{0.6, 0.6}, {1.0, 1.5}, {0.8, 0.5}});
}

Dataset shifted(Dataset d, double by) {
  for (auto& c : d.columns) {
    for (double& v : c) v += by;
  }
  return d;
}

Dataset unlabeled(Dataset d) {
  d.labels.reset();
  return d;
}

}  // namespace

TEST_CASE("fit_class_gaussians examples") {
  SUBCASE("balanced two-cluster column") {
    std::vector<double> col = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    for (std::size_t i = 0; i < col.size(); ++i) col[i] += 1e-3 * static_cast<double>(i % 3);
    const std::vector<int> y = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    const auto [c0, c1] = gsd::fit_class_gaussians(col, y);
    CHECK(c0.mean == doctest::Approx(0.0).epsilon(0.01));
    CHECK(c1.mean == doctest::Approx(1.0).epsilon(0.01));
    CHECK(c0.proportion == 0.5);
    CHECK(c1.proportion == 0.5);
  }
  SUBCASE("proportions count the classes") {
    std::vector<double> col(1000);
    std::vector<int> y(1000, 0);
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = static_cast<double>(i % 17);
    std::fill(y.begin() + 900, y.end(), 1);
    const auto [c0, c1] = gsd::fit_class_gaussians(col, y);
    CHECK(c0.proportion == doctest::Approx(0.9));
    CHECK(c1.proportion == doctest::Approx(0.1));
    CHECK(c0.proportion + c1.proportion == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("seeded sample recovers the generating means") {
    const Dataset d = two_class_gaussian(3, 5000, 0.5, {{-1, 1}}, {{1, 1}});
    const auto [c0, c1] = gsd::fit_class_gaussians(d.columns[0], *d.labels);
    CHECK(std::abs(c0.mean + 1.0) < 0.05);
    CHECK(std::abs(c1.mean - 1.0) < 0.05);
    CHECK(std::abs(c0.std_dev - 1.0) < 0.05);
  }
  SUBCASE("a thin class is rejected") {
    const std::vector<double> col = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<int> y = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
    CHECK(code_of([&] { gsd::fit_class_gaussians(col, y); }) ==
          gsd::ErrorCode::insufficient_class_data);
  }
  SUBCASE("constant column keeps a positive spread") {
    const std::vector<double> col(20, 4.0);
    std::vector<int> y(20, 0);
    std::fill(y.begin() + 10, y.end(), 1);
    const auto [c0, c1] = gsd::fit_class_gaussians(col, y);
    CHECK(c0.std_dev > 0.0);
    CHECK_FALSE(gsd::select_boundary(c0, c1));
  }
}

TEST_CASE("build_split examples") {
  SUBCASE("separating feature beats noise") {
    const Dataset d = two_class_gaussian(5, 2000, 0.5, {{0, 0}, {0, 10}}, {{1, 1}, {1, 1}});
    const std::vector<std::size_t> candidates = {0, 1};
    const auto split = gsd::build_split(d, all_rows(d), candidates);
    REQUIRE(split);
    CHECK(split->feature_index == 1);
    CHECK(split->error < 1e-4);
    CHECK(split->alpha == doctest::Approx(5.0).epsilon(0.02));
  }
  SUBCASE("identical classes give no usable split") {
    const Dataset d = two_class_gaussian(6, 2000, 0.5, {{0, 0}}, {{1, 1}});
    const std::vector<std::size_t> candidates = {0};
    const auto split = gsd::build_split(d, all_rows(d), candidates);
    if (split) CHECK(split->error > 0.45);
  }
  SUBCASE("lower misclassification area wins") {
    // Symmetric classes: E = Phi(-delta/2), so half-gaps 0.5244 and 1.2816
    // target E of 0.3 and 0.1.
    const Dataset d = two_class_gaussian(7, 4000, 0.5, {{-0.5244, 0.5244}, {-1.2816, 1.2816}},
                                         {{1, 1}, {1, 1}});
    const std::vector<std::size_t> candidates = {0, 1};
    const auto split = gsd::build_split(d, all_rows(d), candidates);
    REQUIRE(split);
    CHECK(split->feature_index == 1);
    const auto [a0, a1] = gsd::fit_class_gaussians(d.columns[0], *d.labels);
    const auto [b0, b1] = gsd::fit_class_gaussians(d.columns[1], *d.labels);
    const double e0 = gsd::misclassification_area(a0, a1, gsd::select_boundary(a0, a1)->alpha);
    const double e1 = gsd::misclassification_area(b0, b1, gsd::select_boundary(b0, b1)->alpha);
    CHECK(e0 == doctest::Approx(0.3).epsilon(0.1));
    CHECK(e1 == doctest::Approx(0.1).epsilon(0.1));
    CHECK(split->error == doctest::Approx(e1).epsilon(1e-12));
  }
  SUBCASE("split alpha matches select_boundary of its params") {
    const Dataset d = gaussian_three(8, 1500);
    const std::vector<std::size_t> candidates = {0, 1, 2};
    const auto split = gsd::build_split(d, all_rows(d), candidates);
    REQUIRE(split);
    CHECK(std::abs(split->alpha - gsd::select_boundary(split->class0, split->class1)->alpha) <=
          1e-12);
  }
}

TEST_CASE("train examples") {
  SUBCASE("informative feature is always chosen") {
    const Dataset d = two_class_gaussian(9, 2000, 0.5, {{0, 0}, {-2, 2}}, {{1, 1}, {1, 1}});
    gsd::TrainOptions o;
    o.seed = 4;
    const auto model = gsd::train(d, o);
    CHECK(model.splits.size() == 10);  // max(10, d)
    for (const auto& s : model.splits) {
      // With d = 2 each split sees both features.
      CHECK(s.feature_index == 1);
    }
    CHECK(model.calibration.beta.size() == 1);
  }
  SUBCASE("single split lands near the analytic midpoint") {
    const Dataset d = two_class_gaussian(10, 4000, 0.5, {{-1, 3}}, {{1, 1}});
    gsd::TrainOptions o;
    o.n_splits = 1;
    o.seed = 1;
    const auto model = gsd::train(d, o);
    REQUIRE(model.splits.size() == 1);
    CHECK(std::abs(model.splits[0].alpha - 1.0) < 0.1);
  }
  SUBCASE("constant feature cannot be trained") {
    Dataset d;
    d.columns = {std::vector<double>(100, 2.0)};
    d.feature_names = {"c"};
    std::vector<int> y(100, 0);
    std::fill(y.begin() + 50, y.end(), 1);
    d.labels = y;
    CHECK(code_of([&] { gsd::train(d, {}); }) == gsd::ErrorCode::untrainable_dataset);
  }
  SUBCASE("input validation") {
    const Dataset small = gaussian_three(11, 30);
    CHECK(code_of([&] { gsd::train(small, {}); }) == gsd::ErrorCode::insufficient_data);
    CHECK(code_of([&] { gsd::train(unlabeled(gaussian_three(11, 100)), {}); }) ==
          gsd::ErrorCode::invalid_argument);
    gsd::TrainOptions o;
    o.tau = 0.0;
    CHECK(code_of([&] { gsd::train(gaussian_three(11, 100), o); }) ==
          gsd::ErrorCode::invalid_argument);
  }
  SUBCASE("deterministic under a seed") {
    const Dataset d = gaussian_three(12, 800);
    gsd::TrainOptions o;
    o.seed = 99;
    CHECK(gsd::train(d, o) == gsd::train(d, o));
    o.seed = 100;
    const auto other = gsd::train(d, o);
    o.seed = 99;
    CHECK_FALSE(other == gsd::train(d, o));
  }
}

TEST_CASE("calibrate_beta examples") {
  const std::vector<std::size_t> f0 = {0};
  SUBCASE("stationary data gives a small tolerance") {
    const Dataset d = two_class_gaussian(13, 20000, 0.5, {{-2, 2}}, {{1, 1}});
    for (const int rounds : {1, 19}) {
      const auto cal = gsd::calibrate_beta(d, f0, {}, 5, rounds);
      CHECK(cal.beta.at(0) < 0.2 * 4.0);
      CHECK(cal.fallback.empty());
      CHECK(cal.rounds == rounds);
    }
  }
  SUBCASE("shifting the hold-out part moves alpha-hat by the shift") {
    Dataset d = two_class_gaussian(14, 8000, 0.5, {{-2, 2}}, {{1, 1}});
    const auto [fit_rows, hold_rows] = gsd::calibration_split(d.n_rows(), 21);
    CHECK(fit_rows.size() == 6000);
    CHECK(hold_rows.size() == 2000);
    for (const std::size_t r : hold_rows) d.columns[0][r] += 5.0;
    const auto cal = gsd::calibrate_beta(d, f0, {}, 21, 1);
    CHECK(cal.beta.at(0) == doctest::Approx(5.0).epsilon(0.05));
  }
  SUBCASE("constant feature falls back to the floor") {
    Dataset d = two_class_gaussian(15, 400, 0.5, {{-2, 2}, {0, 0}}, {{1, 1}, {1, 1}});
    d.columns[1].assign(400, 7.0);
    const std::vector<std::size_t> both = {0, 1};
    const auto cal = gsd::calibrate_beta(d, both, {}, 3, 4);
    CHECK(cal.beta.at(1) == 0.0);  // 1e-3 * IQR of a constant column
    CHECK(cal.fallback.contains(1));
    CHECK_FALSE(cal.fallback.contains(0));
  }
  SUBCASE("beta never drops below the IQR floor") {
    const Dataset d = two_class_gaussian(16, 3000, 0.5, {{-2, 2}}, {{1, 1}});
    const auto cal = gsd::calibrate_beta(d, f0, {}, 8, 1);
    const auto [fit_rows, hold_rows] = gsd::calibration_split(d.n_rows(), 8);
    std::vector<double> fit;
    for (const std::size_t r : fit_rows) fit.push_back(d.columns[0][r]);
    std::sort(fit.begin(), fit.end());
    CHECK(cal.beta.at(0) >= 1e-3 * (fit[fit.size() * 3 / 4] - fit[fit.size() / 4]) * 0.99);
  }
  SUBCASE("more rounds never shrink beta") {
    const Dataset d = gaussian_three(17, 2000);
    const std::vector<std::size_t> all = {0, 1, 2};
    const auto one = gsd::calibrate_beta(d, all, {}, 6, 1);
    const auto many = gsd::calibrate_beta(d, all, {}, 6, 12);
    for (const std::size_t f : all) CHECK(many.beta.at(f) >= one.beta.at(f));
  }
}

TEST_CASE("detect examples") {
  const Dataset train_data = gaussian_three(20, 3000);
  gsd::TrainOptions o;
  o.seed = 3;
  const auto model = gsd::train(train_data, o);

  SUBCASE("stationary batches do not drift") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto report = gsd::detect(model, unlabeled(gaussian_three(100 + s, 1000)));
      CHECK_FALSE(report.drift);
      CHECK(report.ratio < model.tau);
    }
  }
  SUBCASE("a five-sigma shift of every feature drifts") {
    // Largest class spread across features is 1.5.
    const auto report = gsd::detect(model, unlabeled(shifted(gaussian_three(200, 1000), 7.5)));
    CHECK(report.drift);
    CHECK(report.ratio >= 0.9);
  }
  SUBCASE("too few rows") {
    CHECK(code_of([&] { gsd::detect(model, unlabeled(gaussian_three(1, 5))); }) ==
          gsd::ErrorCode::insufficient_batch);
  }
  SUBCASE("missing feature") {
    Dataset batch = unlabeled(gaussian_three(2, 100));
    const std::size_t used = model.splits.front().feature_index;
    batch.columns.erase(batch.columns.begin() + static_cast<std::ptrdiff_t>(used));
    batch.feature_names.erase(batch.feature_names.begin() + static_cast<std::ptrdiff_t>(used));
    CHECK(code_of([&] { gsd::detect(model, batch); }) == gsd::ErrorCode::schema_mismatch);
  }
  SUBCASE("columns are matched by name") {
    Dataset batch = unlabeled(gaussian_three(3, 500));
    Dataset reversed = batch;
    std::reverse(reversed.columns.begin(), reversed.columns.end());
    std::reverse(reversed.feature_names.begin(), reversed.feature_names.end());
    CHECK(gsd::detect(model, batch) == gsd::detect(model, reversed));
  }
}

TEST_CASE("detector properties") {
  const Dataset train_data = gaussian_three(30, 2000);
  gsd::TrainOptions o;
  o.seed = 8;
  const auto model = gsd::train(train_data, o);

  SUBCASE("determinism") {
    const Dataset batch = unlabeled(shifted(gaussian_three(31, 600), 0.3));
    CHECK(gsd::train(train_data, o) == model);
    CHECK(gsd::detect(model, batch) == gsd::detect(model, batch));
  }

  SUBCASE("training data as the batch rarely drifts") {
    int quiet = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Dataset d = gaussian_three(300 + s, 2000);
      gsd::TrainOptions opt;
      opt.seed = s;
      const auto m = gsd::train(d, opt);
      quiet += gsd::detect(m, unlabeled(d)).ratio < 0.5 ? 1 : 0;
    }
    CHECK(quiet >= 9);
  }

  SUBCASE("verdict is monotone in tau and accounting adds up") {
    for (const double shift : {0.0, 0.2, 0.5, 1.0, 3.0}) {
      const Dataset batch = unlabeled(shifted(gaussian_three(40, 800), shift));
      bool previous = true;
      for (double tau = 0.05; tau <= 1.0 + 1e-12; tau += 0.05) {
        gsd::GsdModel m = model;
        m.tau = std::min(tau, 1.0);
        const auto r = gsd::detect(m, batch);
        CHECK((!r.drift || previous));
        previous = r.drift;

        int exceeded = 0;
        int stable = 0;
        for (const auto& s : r.per_split) {
          if (!s.alpha_hat) {
            CHECK_FALSE(s.exceeded);
            CHECK_FALSE(s.delta);
          } else if (s.exceeded) {
            ++exceeded;
          } else {
            ++stable;
          }
        }
        CHECK(exceeded == r.gamma);
        CHECK(r.gamma + r.excluded() + stable == static_cast<int>(model.splits.size()));
        CHECK(r.ratio == doctest::Approx(static_cast<double>(r.gamma) /
                                         static_cast<double>(model.splits.size())));
      }
    }
  }

  SUBCASE("an affine map on one feature keeps every flag") {
    const double scale = 3.5;
    const double offset = -12.0;
    const auto remap = [&](Dataset d) {
      for (double& v : d.columns[1]) v = scale * v + offset;
      return d;
    };
    for (const double shift : {0.0, 0.4, 2.0}) {
      const Dataset batch = unlabeled(shifted(gaussian_three(50, 800), shift));
      const auto base = gsd::detect(model, batch);
      const auto mapped_model = gsd::train(remap(train_data), o);
      const auto mapped = gsd::detect(mapped_model, remap(batch));
      REQUIRE(base.per_split.size() == mapped.per_split.size());
      for (std::size_t i = 0; i < base.per_split.size(); ++i) {
        CHECK(base.per_split[i].feature_index == mapped.per_split[i].feature_index);
        CHECK(base.per_split[i].exceeded == mapped.per_split[i].exceeded);
      }
      CHECK(base.drift == mapped.drift);
    }
  }
}

TEST_CASE("non-converged or boundary-less fits are excluded but still counted") {
  const Dataset train_data = gaussian_three(60, 1500);
  gsd::TrainOptions o;
  o.seed = 2;
  o.em_config.max_iterations = 1;
  o.em_config.tolerance = 1e-300;
  const auto model = gsd::train(train_data, o);
  const auto r = gsd::detect(model, unlabeled(gaussian_three(61, 500)));
  CHECK(r.evaluated == 0);
  CHECK(r.gamma == 0);
  CHECK(r.ratio == 0.0);
  CHECK_FALSE(r.drift);
  CHECK(r.excluded() == static_cast<int>(model.splits.size()));
  for (const auto& s : r.per_split) CHECK_FALSE(s.em_converged);
}
