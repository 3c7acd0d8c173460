#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace reidtk {

/// Dense row-major matrix of doubles. Value type; copies are deep.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  /// Copy of rows [first, first + count).
  Matrix slice_rows(std::size_t first, std::size_t count) const;

  /// Index of the first row holding a NaN or infinity, or rows() if none.
  std::size_t first_non_finite_row() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// N x d embedding matrix, one sample per row.
class FeatureMatrix : public Matrix {
 public:
  FeatureMatrix() = default;
  using Matrix::Matrix;
  explicit FeatureMatrix(Matrix m) : Matrix(std::move(m)) {}

  static FeatureMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    return FeatureMatrix(Matrix::from_rows(rows));
  }

  std::size_t dim() const noexcept { return cols(); }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

/// Distance (or similarity) matrix. `squared` records whether entries are
/// squared Euclidean distances.
class DistanceMatrix : public Matrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t rows, std::size_t cols, bool squared, double fill = 0.0)
      : Matrix(rows, cols, fill), squared_(squared) {}
  DistanceMatrix(Matrix m, bool squared) : Matrix(std::move(m)), squared_(squared) {}

  bool squared() const noexcept { return squared_; }
  void set_squared(bool squared) noexcept { squared_ = squared; }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  bool squared_ = false;
};

/// Stacks `top` above `bottom`; column counts must agree.
FeatureMatrix concat_rows(const FeatureMatrix& top, const FeatureMatrix& bottom);

}  // namespace reidtk
