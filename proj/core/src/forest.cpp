#include "gsd/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gsd/error.hpp"
#include "gsd/seed.hpp"

namespace gsd {

namespace {

double gini(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (const double c : counts) sum_sq += c * c;
  return 1.0 - sum_sq / (total * total);
}

}  // namespace

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, std::span<const int> target, int n_classes,
              const ForestOptions& options, std::size_t mtry, RandomForest& forest)
      : data_(data),
        target_(target),
        k_(static_cast<std::size_t>(n_classes)),
        options_(options),
        mtry_(mtry),
        forest_(forest),
        pool_(data.n_features()) {}

  RandomForest::Tree build(std::vector<std::size_t> rows, Rng& rng) {
    RandomForest::Tree tree;
    grow(tree, rows, 0, rows.size(), 0, rng);
    return tree;
  }

 private:
  int grow(RandomForest::Tree& tree, std::vector<std::size_t>& rows,
           std::size_t begin, std::size_t end, int depth, Rng& rng) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::vector<double> counts(k_, 0.0);
    for (std::size_t i = begin; i < end; ++i) counts[target_[rows[i]]] += 1.0;
    const double n = static_cast<double>(end - begin);
    const double node_gini = gini(counts, n);

    const auto make_leaf = [&]() {
      tree.nodes[id].proba = forest_.probabilities_.size();
      for (const double c : counts) forest_.probabilities_.push_back(c / n);
      return id;
    };
    if (depth >= options_.max_depth || end - begin < options_.min_samples_split ||
        node_gini <= 0.0) {
      return make_leaf();
    }

    std::iota(pool_.begin(), pool_.end(), std::size_t{0});
    double best_decrease = 0.0;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    bool found = false;

    std::vector<std::size_t> order(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                   rows.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<double> left(k_);
    for (std::size_t t = 0; t < mtry_; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, pool_.size() - 1);
      std::swap(pool_[t], pool_[pick(rng)]);
      const std::size_t f = pool_[t];
      const std::vector<double>& col = data_.columns[f];
      std::sort(order.begin(), order.end(),
                [&col](std::size_t a, std::size_t b) { return col[a] < col[b]; });
      std::fill(left.begin(), left.end(), 0.0);
      double left_sq = 0.0;
      double right_sq = 0.0;
      std::vector<double> right = counts;
      for (const double c : right) right_sq += c * c;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const int y = target_[order[i]];
        left_sq += 2.0 * left[y] + 1.0;
        left[y] += 1.0;
        right_sq -= 2.0 * right[y] - 1.0;
        right[y] -= 1.0;
        const double x0 = col[order[i]];
        const double x1 = col[order[i + 1]];
        if (!(x0 < x1)) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        const double child = (nl - left_sq / nl) + (nr - right_sq / nr);
        const double decrease = n * node_gini - child;
        if (decrease > best_decrease + 1e-12) {
          best_decrease = decrease;
          best_feature = f;
          best_threshold = 0.5 * (x0 + x1);
          found = true;
        }
      }
    }
    if (!found) return make_leaf();

    const std::vector<double>& col = data_.columns[best_feature];
    const auto mid = std::partition(
        rows.begin() + static_cast<std::ptrdiff_t>(begin),
        rows.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t r) { return col[r] <= best_threshold; });
    const auto split = static_cast<std::size_t>(mid - rows.begin());

    forest_.importance_[best_feature] += best_decrease;
    tree.nodes[id].feature = best_feature;
    tree.nodes[id].threshold = best_threshold;
    const int l = grow(tree, rows, begin, split, depth + 1, rng);
    const int r = grow(tree, rows, split, end, depth + 1, rng);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  const Dataset& data_;
  std::span<const int> target_;
  std::size_t k_;
  const ForestOptions& options_;
  std::size_t mtry_;
  RandomForest& forest_;
  std::vector<std::size_t> pool_;
};

RandomForest RandomForest::fit(const Dataset& data, std::span<const int> target,
                               const ForestOptions& options, std::uint64_t seed) {
  const std::size_t n = data.n_rows();
  const std::size_t d = data.n_features();
  if (target.size() != n || n == 0 || d == 0) {
    throw Error(ErrorCode::invalid_argument,
                "forest needs a non-empty dataset with a matching target");
  }
  int n_classes = 0;
  for (const int y : target) {
    if (y < 0) throw Error(ErrorCode::invalid_argument, "negative class id");
    n_classes = std::max(n_classes, y + 1);
  }
  std::vector<std::size_t> per_class(static_cast<std::size_t>(n_classes), 0);
  for (const int y : target) ++per_class[static_cast<std::size_t>(y)];
  if (std::count_if(per_class.begin(), per_class.end(),
                    [](std::size_t c) { return c > 0; }) < 2) {
    throw Error(ErrorCode::untrainable_dataset,
                "reference forest needs at least two classes");
  }

  RandomForest forest;
  forest.n_classes_ = n_classes;
  forest.importance_.assign(d, 0.0);
  const std::size_t mtry = std::min(
      d, options.features_per_node
             ? options.features_per_node
             : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
  TreeBuilder builder(data, target, n_classes, options, mtry, forest);
  std::vector<std::size_t> rows(n);
  for (std::size_t t = 0; t < options.n_trees; ++t) {
    Rng rng(derive_seed(seed, t));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (auto& r : rows) r = pick(rng);
    forest.trees_.push_back(builder.build(rows, rng));
  }
  const double total =
      std::accumulate(forest.importance_.begin(), forest.importance_.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : forest.importance_) v /= total;
  }
  return forest;
}

int RandomForest::predict_row(const Dataset& data, std::size_t row) const {
  std::vector<double> votes(static_cast<std::size_t>(n_classes_), 0.0);
  for (const Tree& tree : trees_) {
    const Node* node = &tree.nodes.front();
    while (node->left >= 0) {
      node = data.columns[node->feature][row] <= node->threshold
                 ? &tree.nodes[static_cast<std::size_t>(node->left)]
                 : &tree.nodes[static_cast<std::size_t>(node->right)];
    }
    for (std::size_t c = 0; c < votes.size(); ++c) {
      votes[c] += probabilities_[node->proba + c];
    }
  }
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) -
                          votes.begin());
}

std::vector<int> RandomForest::predict(const Dataset& data) const {
  if (data.n_features() != importance_.size()) {
    throw Error(ErrorCode::schema_mismatch,
                fmt::format("forest expects {} features, got {}",
                            importance_.size(), data.n_features()));
  }
  std::vector<int> out(data.n_rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict_row(data, i);
  return out;
}

double RandomForest::accuracy(const Dataset& data, std::span<const int> target) const {
  const std::vector<int> predicted = predict(data);
  if (predicted.size() != target.size() || predicted.empty()) {
    throw Error(ErrorCode::invalid_argument, "accuracy needs a matching target");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == target[i];
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::vector<std::size_t> RandomForest::ranking() const {
  std::vector<std::size_t> order(importance_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return importance_[a] > importance_[b];
  });
  return order;
}

std::span<const int> reference_target(const Dataset& data) {
  if (data.classes) return *data.classes;
  if (data.labels) return *data.labels;
  throw Error(ErrorCode::invalid_argument, "dataset has no target");
}

std::vector<std::size_t> feature_importance(const Dataset& data, std::uint64_t seed,
                                            const ForestOptions& options) {
  return RandomForest::fit(data, reference_target(data), options, seed).ranking();
}

}  // namespace gsd
