#include "gsd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "gsd/error.hpp"

namespace gsd {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// RFC 4180-style field split: quoted fields may contain commas and "".
std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back(trim(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  fields.emplace_back(trim(field));
  return fields;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::size_t resolve_label(const std::vector<std::string>& header,
                          const std::string& label) {
  if (const auto it = std::find(header.begin(), header.end(), label);
      it != header.end()) {
    return static_cast<std::size_t>(it - header.begin());
  }
  std::size_t index = 0;
  const auto [ptr, ec] =
      std::from_chars(label.data(), label.data() + label.size(), index);
  if (ec == std::errc{} && ptr == label.data() + label.size() &&
      index < header.size()) {
    return index;
  }
  throw Error(ErrorCode::missing_label_column,
              fmt::format("label column '{}' not found in header", label));
}

}  // namespace

std::optional<std::size_t> Dataset::feature_index(std::string_view name) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names.begin());
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.columns.resize(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.columns[j].reserve(rows.size());
    for (const std::size_t r : rows) out.columns[j].push_back(columns[j].at(r));
  }
  const auto pick = [&](const std::optional<std::vector<int>>& src) {
    std::optional<std::vector<int>> dst;
    if (src) {
      dst.emplace();
      dst->reserve(rows.size());
      for (const std::size_t r : rows) dst->push_back(src->at(r));
    }
    return dst;
  };
  out.labels = pick(labels);
  out.classes = pick(classes);
  return out;
}

void Dataset::validate() const {
  if (feature_names.size() != columns.size()) {
    throw Error(ErrorCode::invalid_argument,
                "feature_names and columns differ in length");
  }
  const std::size_t n = n_rows();
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("column {} has {} rows, expected {}", j,
                              columns[j].size(), n));
    }
    for (const double v : columns[j]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("column '{}' holds a non-finite value",
                                feature_names[j]));
      }
    }
  }
  if (labels) {
    if (labels->size() != n) {
      throw Error(ErrorCode::invalid_argument, "label length mismatch");
    }
    for (const int y : *labels) {
      if (y != 0 && y != 1) {
        throw Error(ErrorCode::non_binary_label, "labels must be 0 or 1");
      }
    }
  }
  if (classes && classes->size() != n) {
    throw Error(ErrorCode::invalid_argument, "class target length mismatch");
  }
}

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(ErrorCode::parse_error, "empty CSV input: missing header",
                     1, 0);
  }
  const std::vector<std::string> header = split_fields(line);
  const std::size_t width = header.size();

  std::optional<std::size_t> label_col;
  if (!options.label_column.empty()) {
    label_col = resolve_label(header, options.label_column);
  }

  std::vector<std::vector<std::string>> cells(width);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != width) {
      throw ParseError(ErrorCode::parse_error,
                       fmt::format("line {}: expected {} fields, found {}",
                                   line_no, width, fields.size()),
                       line_no, std::min(fields.size(), width) + 1);
    }
    for (std::size_t j = 0; j < width; ++j) cells[j].push_back(std::move(fields[j]));
  }

  Dataset data;
  const std::size_t n = cells.empty() ? 0 : cells.front().size();
  for (std::size_t j = 0; j < width; ++j) {
    if (label_col && j == *label_col) {
      std::vector<int> labels;
      labels.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = parse_number(cells[j][i]);
        if (!v || (*v != 0.0 && *v != 1.0)) {
          throw ParseError(
              ErrorCode::non_binary_label,
              fmt::format("line {}: label '{}' is not 0 or 1", i + 2,
                          cells[j][i]),
              i + 2, j + 1);
        }
        labels.push_back(*v == 1.0 ? 1 : 0);
      }
      data.labels = std::move(labels);
      continue;
    }
    std::vector<double> column;
    column.reserve(n);
    bool numeric = true;
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = parse_number(cells[j][i]);
      if (!v) {
        if (options.drop_non_numeric) {
          numeric = false;
          break;
        }
        throw ParseError(
            ErrorCode::parse_error,
            fmt::format("line {}, column {} ('{}'): cannot parse '{}' as a "
                        "finite number",
                        i + 2, j + 1, header[j], cells[j][i]),
            i + 2, j + 1);
      }
      column.push_back(*v);
    }
    if (!numeric) continue;
    data.columns.push_back(std::move(column));
    data.feature_names.push_back(header[j]);
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error,
                fmt::format("cannot open '{}' for reading", path.string()));
  }
  return read_csv(in, options);
}

void write_csv(const Dataset& data, std::ostream& out) {
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    if (j) out << ',';
    out << data.feature_names[j];
  }
  if (data.labels) out << (data.n_features() ? "," : "") << "label";
  out << '\n';
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < data.n_features(); ++j) {
      if (j) out << ',';
      out << fmt::format("{}", data.columns[j][i]);
    }
    if (data.labels) out << (data.n_features() ? "," : "") << (*data.labels)[i];
    out << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::io_error,
                fmt::format("cannot open '{}' for writing", path.string()));
  }
  write_csv(data, out);
}

}  // namespace gsd
