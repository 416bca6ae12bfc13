#include "mlpinit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlpinit/errors.hpp"

namespace mlpinit {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw ShapeError("ragged matrix literal");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

namespace {

void require_shape(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() +
                     " and " + b.shape_string());
  }
}

}  // namespace

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  }
  return out;
}

namespace {

// AVX2 clone picked at load time on x86-64. No FMA, so every clone rounds the
// same way.
#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
#define MLPINIT_KERNEL_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define MLPINIT_KERNEL_CLONES
#endif

// out (m x n, zeroed) += a (m x k) * b (k x n), all row-major.
MLPINIT_KERNEL_CLONES
void gemm_kernel(const double* a, const double* b, double* out, std::size_t m, std::size_t k,
                 std::size_t n) {
  // Four output rows share each streamed row of b. Every output element is
  // still accumulated in increasing p order, so results do not depend on the
  // blocking.
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    double* __restrict o0 = out + i * n;
    double* __restrict o1 = o0 + n;
    double* __restrict o2 = o1 + n;
    double* __restrict o3 = o2 + n;
    for (std::size_t p = 0; p < k; ++p) {
      const double a0 = a[i * k + p], a1 = a[(i + 1) * k + p], a2 = a[(i + 2) * k + p],
                   a3 = a[(i + 3) * k + p];
      const double* __restrict br = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double bv = br[j];
        o0[j] += a0 * bv;
        o1[j] += a1 * bv;
        o2[j] += a2 * bv;
        o3[j] += a3 * bv;
      }
    }
  }
  for (; i < m; ++i) {
    double* __restrict o = out + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double ai = a[i * k + p];
      const double* __restrict br = b + p * n;
      for (std::size_t j = 0; j < n; ++j) o[j] += ai * br[j];
    }
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_shape(a.cols() == b.rows(), "matmul", a, b);
  Matrix out(a.rows(), b.cols());
  if (out.size() != 0) {
    gemm_kernel(a.data().data(), b.data().data(), out.data().data(), a.rows(), a.cols(), b.cols());
  }
  return out;
}

Matrix matmul_transpose_b(const Matrix& a, const Matrix& b) {
  require_shape(a.cols() == b.cols(), "matmul_transpose_b", a, b);
  return matmul(a, transpose(b));
}

Matrix matmul_transpose_a(const Matrix& a, const Matrix& b) {
  require_shape(a.rows() == b.rows(), "matmul_transpose_a", a, b);
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  Matrix out(m, n);
  for (std::size_t p = 0; p < k; ++p) {
    const auto a_row = a.row(p);
    const auto b_row = b.row(p);
    for (std::size_t i = 0; i < m; ++i) {
      const double api = a_row[i];
      if (api == 0.0) continue;
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        out_row[j] += api * b_row[j];
      }
    }
  }
  return out;
}

void add_row_vector(Matrix& m, std::span<const double> bias) {
  if (bias.size() != m.cols()) {
    throw ShapeError("add_row_vector: bias length " + std::to_string(bias.size()) +
                     " does not match " + m.shape_string());
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      r[j] += bias[j];
    }
  }
}

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.data()) {
    v = v > 0.0 ? v : 0.0;
  }
  return out;
}

Matrix softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto in = logits.row(i);
    auto dst = out.row(i);
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      dst[j] = std::exp(in[j] - peak);
      total += dst[j];
    }
    for (double& v : dst) {
      v /= total;
    }
  }
  return out;
}

double cross_entropy(const Matrix& probs, std::span<const int> labels) {
  if (labels.size() != probs.rows()) {
    throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                     probs.shape_string() + " probabilities");
  }
  if (probs.rows() == 0) {
    throw ValidationError("cross_entropy: empty batch");
  }
  constexpr double kFloor = 1e-15;
  double total = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= probs.cols()) {
      throw ValidationError("cross_entropy: label " + std::to_string(label) +
                            " out of range [0, " + std::to_string(probs.cols()) + ")");
    }
    total -= std::log(std::max(probs(i, label), kFloor));
  }
  return total / static_cast<double>(probs.rows());
}

std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < r.size(); ++j) {
      if (r[j] > r[best]) best = j;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double mu = mean(values);
  double total = 0.0;
  for (double v : values) total += (v - mu) * (v - mu);
  return total / static_cast<double>(values.size());
}

}  // namespace mlpinit
