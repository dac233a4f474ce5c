// Copyright 2026 The vqaprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VQAPROBE_CORE_MATRIX_H_
#define VQAPROBE_CORE_MATRIX_H_

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fmt/format.h"

namespace vqaprobe {

// Row-major real matrix. The tag keeps image features and question
// embeddings from being passed where the other is expected.
template <typename Tag>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), values_(static_cast<size_t>(rows) * cols) {}
  DenseMatrix(int rows, int cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {}

  static absl::StatusOr<DenseMatrix> FromRows(
      const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
      return absl::InvalidArgumentError("matrix needs at least one row and "
                                        "one column");
    }
    const size_t cols = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * cols);
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) {
        return absl::InvalidArgumentError(fmt::format(
            "ragged matrix: row {} has {} columns, expected {}", r,
            rows[r].size(), cols));
      }
      values.insert(values.end(), rows[r].begin(), rows[r].end());
    }
    DenseMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols),
                  std::move(values));
    if (absl::Status s = m.Validate(); !s.ok()) return s;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  double operator()(int r, int c) const { return values_[Offset(r, c)]; }
  double& operator()(int r, int c) { return values_[Offset(r, c)]; }

  std::span<const double> row(int r) const {
    return {values_.data() + static_cast<size_t>(r) * cols_,
            static_cast<size_t>(cols_)};
  }
  const std::vector<double>& values() const { return values_; }

  std::vector<std::vector<double>> ToRows() const {
    std::vector<std::vector<double>> out;
    out.reserve(rows_);
    for (int r = 0; r < rows_; ++r) {
      auto span = row(r);
      out.emplace_back(span.begin(), span.end());
    }
    return out;
  }

  // R >= 1, D >= 1, all entries finite, storage consistent with shape.
  absl::Status Validate() const {
    if (rows_ < 1 || cols_ < 1) {
      return absl::InvalidArgumentError(
          fmt::format("matrix shape {}x{} is empty", rows_, cols_));
    }
    if (values_.size() != static_cast<size_t>(rows_) * cols_) {
      return absl::InvalidArgumentError("matrix storage does not match shape");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError("matrix has non-finite entries");
      }
    }
    return absl::OkStatus();
  }

  bool operator==(const DenseMatrix&) const = default;

 private:
  size_t Offset(int r, int c) const {
    return static_cast<size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

struct ImageFeatureTag {};
struct QuestionEmbeddingTag {};

// R region vectors x D dims.
using FeatureMatrix = DenseMatrix<ImageFeatureTag>;
// T token vectors x E dims.
using EmbeddingMatrix = DenseMatrix<QuestionEmbeddingTag>;

}  // namespace vqaprobe

#endif  // VQAPROBE_CORE_MATRIX_H_
