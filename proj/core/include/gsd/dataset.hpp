#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gsd {

/// Column-major numeric table with an optional binary label.
struct Dataset {
  std::vector<std::vector<double>> columns;
  std::vector<std::string> feature_names;
  /// Binary target in {0, 1}.
  std::optional<std::vector<int>> labels;
  /// Original multi-class target (e.g. waveform's three classes) kept next to
  /// the binarized `labels` for reference-model scoring. Values in [0, K).
  std::optional<std::vector<int>> classes;

  std::size_t n_rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t n_features() const { return columns.size(); }
  bool has_labels() const { return labels.has_value(); }

  std::optional<std::size_t> feature_index(std::string_view name) const;

  /// Rows in the given order; indices may repeat.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Checks shape and value invariants; throws invalid_argument.
  void validate() const;
};

struct CsvOptions {
  /// Header name or zero-based column index of the label. Empty for an
  /// unlabeled file.
  std::string label_column;
  bool drop_non_numeric = false;
};

Dataset read_csv(std::istream& in, const CsvOptions& options);
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options);

/// Writes features then, when present, the binary label as column `label`.
void write_csv(const Dataset& data, std::ostream& out);
void save_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace gsd
