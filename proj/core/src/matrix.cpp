#include "reidtk/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reidtk/error.hpp"

namespace reidtk {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ConfigError("matrix data has " + std::to_string(data_.size()) + " values, expected " +
                      std::to_string(rows_ * cols_));
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t d = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw ConfigError("ragged row in matrix literal");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix(n, d, std::move(data));
}

Matrix Matrix::slice_rows(std::size_t first, std::size_t count) const {
  if (first > rows_ || count > rows_ - first) throw ConfigError("row slice out of range");
  const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * cols_);
  return Matrix(count, cols_, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * cols_)));
}

std::size_t Matrix::first_non_finite_row() const noexcept {
  const auto it = std::find_if(data_.begin(), data_.end(), [](double v) { return !std::isfinite(v); });
  if (it == data_.end() || cols_ == 0) return rows_;
  return static_cast<std::size_t>(it - data_.begin()) / cols_;
}

FeatureMatrix concat_rows(const FeatureMatrix& top, const FeatureMatrix& bottom) {
  if (top.cols() != bottom.cols()) {
    throw ConfigError("cannot stack matrices with " + std::to_string(top.cols()) + " and " +
                      std::to_string(bottom.cols()) + " columns");
  }
  std::vector<double> data;
  data.reserve(top.size() + bottom.size());
  data.insert(data.end(), top.values().begin(), top.values().end());
  data.insert(data.end(), bottom.values().begin(), bottom.values().end());
  return FeatureMatrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

}  // namespace reidtk
