#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mlpinit {

// Dense row-major matrix of doubles. Zero-row matrices are allowed so that an
// empty split can still be represented as a batch.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // "RxC", used in error messages.
  std::string shape_string() const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& m);

// a[m x k] * b[k x n]
Matrix matmul(const Matrix& a, const Matrix& b);

// a[m x k] * b[n x k]^T, the layout used by the forward pass (X * W^T).
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b);

// a[k x m]^T * b[k x n], the layout used for weight gradients (delta^T * X).
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b);

// Adds `bias` to every row of `m` in place.
void add_row_vector(Matrix& m, std::span<const double> bias);

Matrix relu(const Matrix& x);

// Row-wise softmax with the row maximum subtracted before exponentiation.
Matrix softmax(const Matrix& logits);

// Mean over rows of -ln(p[label]), with p clamped below at 1e-15.
double cross_entropy(const Matrix& probs, std::span<const int> labels);

// Index of the largest entry per row; ties go to the lowest index.
std::vector<int> argmax_rows(const Matrix& m);

// Population variance over all entries.
double variance(std::span<const double> values);
double mean(std::span<const double> values);

}  // namespace mlpinit
