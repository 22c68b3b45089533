#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "emorec/error.hpp"
#include "emorec/labels.hpp"

namespace emorec {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_)
      fail(ErrorCode::DimensionMismatch, "row of length " + std::to_string(values.size()) +
                                             " appended to matrix with " + std::to_string(cols_) +
                                             " columns");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  Matrix select_columns(std::span<const std::size_t> columns) const {
    Matrix out(rows_, columns.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < columns.size(); ++j) out(r, j) = (*this)(r, columns[j]);
    return out;
  }

  Matrix select_rows(std::span<const std::size_t> rows) const {
    Matrix out(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto src = row(rows[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Feature matrix with one label, speaker and source id per row.
struct LabeledDataset {
  std::vector<std::string> feature_names;
  Matrix values;
  std::vector<Label> labels;
  std::vector<int> speakers;
  std::vector<std::string> source_ids;
  std::string provenance;

  std::size_t size() const { return labels.size(); }
  std::size_t num_features() const { return feature_names.size(); }

  void add_row(std::span<const double> row, Label label, int speaker, std::string source_id) {
    if (row.size() != feature_names.size())
      fail(ErrorCode::DimensionMismatch, "row has " + std::to_string(row.size()) +
                                             " values, schema has " +
                                             std::to_string(feature_names.size()));
    if (values.rows() == 0 && values.cols() == 0) values = Matrix(0, feature_names.size());
    values.append_row(row);
    labels.push_back(label);
    speakers.push_back(speaker);
    source_ids.push_back(std::move(source_id));
  }

  std::vector<int> class_ids() const {
    std::vector<int> out(labels.size());
    std::transform(labels.begin(), labels.end(), out.begin(),
                   [](Label l) { return static_cast<int>(l); });
    return out;
  }

  LabeledDataset select_columns(std::span<const std::size_t> columns) const {
    LabeledDataset out;
    for (std::size_t c : columns) out.feature_names.push_back(feature_names.at(c));
    out.values = values.select_columns(columns);
    out.labels = labels;
    out.speakers = speakers;
    out.source_ids = source_ids;
    out.provenance = provenance;
    return out;
  }

  LabeledDataset select_rows(std::span<const std::size_t> rows) const {
    LabeledDataset out;
    out.feature_names = feature_names;
    out.values = values.select_rows(rows);
    for (std::size_t r : rows) {
      out.labels.push_back(labels.at(r));
      out.speakers.push_back(speakers.at(r));
      out.source_ids.push_back(source_ids.at(r));
    }
    out.provenance = provenance;
    return out;
  }

  bool operator==(const LabeledDataset&) const = default;
};

/// Row/column consistency, unique source ids and finite values.
inline void validate(const LabeledDataset& d) {
  const std::size_t n = d.labels.size();
  if (d.speakers.size() != n || d.source_ids.size() != n || d.values.rows() != n)
    fail(ErrorCode::InvalidDataset, "row count mismatch between values and metadata");
  if (n > 0 && d.values.cols() != d.feature_names.size())
    fail(ErrorCode::InvalidDataset, "value width does not match the feature names");
  std::unordered_set<std::string> seen;
  for (const auto& id : d.source_ids)
    if (!seen.insert(id).second) fail(ErrorCode::InvalidDataset, "duplicate source id " + id);
  for (std::size_t r = 0; r < n; ++r)
    for (double v : d.values.row(r))
      if (!std::isfinite(v))
        fail(ErrorCode::InvalidDataset, "non-finite value in row " + d.source_ids[r]);
}

}  // namespace emorec
