#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gsd/dataset.hpp"

namespace gsd {

struct ForestOptions {
  std::size_t n_trees = 50;
  int max_depth = 8;
  std::size_t min_samples_split = 2;
  /// Features drawn per node; 0 selects ceil(sqrt(d)).
  std::size_t features_per_node = 0;
};

/// CART random forest with Gini splits and bootstrap rows. Used as the
/// reference classifier of the benchmark protocol.
class RandomForest {
 public:
  /// `target` holds class ids in [0, n_classes).
  static RandomForest fit(const Dataset& data, std::span<const int> target,
                          const ForestOptions& options, std::uint64_t seed);

  int predict_row(const Dataset& data, std::size_t row) const;
  std::vector<int> predict(const Dataset& data) const;
  double accuracy(const Dataset& data, std::span<const int> target) const;

  /// Total weighted Gini decrease per feature, normalized to sum to 1 when
  /// any split was made.
  const std::vector<double>& importance() const { return importance_; }

  /// Feature indices by decreasing importance; ties keep the lower index.
  std::vector<std::size_t> ranking() const;

  int n_classes() const { return n_classes_; }

 private:
  struct Node {
    std::size_t feature = 0;
    double threshold = 0.0;
    int left = -1;  // -1 marks a leaf
    int right = -1;
    std::size_t proba = 0;  // offset into probabilities_ for leaves
  };
  struct Tree {
    std::vector<Node> nodes;
  };

  std::vector<Tree> trees_;
  std::vector<double> probabilities_;
  std::vector<double> importance_;
  int n_classes_ = 0;

  friend class TreeBuilder;
};

/// Class target used for the reference forest: the multi-class target when
/// the dataset carries one, otherwise the binary labels.
std::span<const int> reference_target(const Dataset& data);

/// Ranks features by random-forest Gini importance (most important first).
/// Throws untrainable_dataset when the target has a single class.
std::vector<std::size_t> feature_importance(const Dataset& data,
                                            std::uint64_t seed,
                                            const ForestOptions& options = {});

}  // namespace gsd
