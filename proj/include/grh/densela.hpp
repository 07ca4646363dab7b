#pragma once

// Small dense linear algebra kernel: row-major matrices, products,
// unit-triangular solves and norm estimates. No pivoted factorizations.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace grh {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }

  double* data() { return values_.data(); }
  [[nodiscard]] const double* data() const { return values_.data(); }
  [[nodiscard]] std::span<const double> values() const { return values_; }

  [[nodiscard]] DenseMatrix transposed() const;
  /// Rows [first, first+count).
  [[nodiscard]] DenseMatrix row_range(std::size_t first, std::size_t count) const;
  /// Rows selected by index, in the given order.
  [[nodiscard]] DenseMatrix select_rows(std::span<const std::size_t> rows) const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);

/// A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// A * B^T
DenseMatrix matmul_transposed(const DenseMatrix& a, const DenseMatrix& b);
/// A^T * B
DenseMatrix transposed_matmul(const DenseMatrix& a, const DenseMatrix& b);

/// y += alpha * A x
void gemv(double alpha, const DenseMatrix& a, std::span<const double> x, std::span<double> y);
/// y += alpha * A^T x
void gemv_transposed(double alpha, const DenseMatrix& a, std::span<const double> x, std::span<double> y);

/// Solves L X = rhs for unit lower triangular L. Entries above the diagonal
/// and the diagonal itself are not read.
DenseMatrix forward_substitution(const DenseMatrix& lower, const DenseMatrix& rhs);

/// Solves X L = rhs for unit lower triangular L, i.e. X = rhs L^{-1}.
DenseMatrix solve_unit_lower_right(const DenseMatrix& lower, const DenseMatrix& rhs);

double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);

double norm2(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// Matrix-free view of a linear map R^cols -> R^rows.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  [[nodiscard]] virtual std::size_t rows() const = 0;
  [[nodiscard]] virtual std::size_t cols() const = 0;
  /// y += alpha * A x
  virtual void apply(double alpha, std::span<const double> x, std::span<double> y) const = 0;
  /// y += alpha * A^T x
  virtual void apply_transposed(double alpha, std::span<const double> x, std::span<double> y) const = 0;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(const DenseMatrix& a) : a_(&a) {}
  [[nodiscard]] std::size_t rows() const override { return a_->rows(); }
  [[nodiscard]] std::size_t cols() const override { return a_->cols(); }
  void apply(double alpha, std::span<const double> x, std::span<double> y) const override { gemv(alpha, *a_, x, y); }
  void apply_transposed(double alpha, std::span<const double> x, std::span<double> y) const override {
    gemv_transposed(alpha, *a_, x, y);
  }

 private:
  const DenseMatrix* a_;
};

/// Difference A - B of two operators with equal shape.
class DifferenceOperator final : public LinearOperator {
 public:
  DifferenceOperator(const LinearOperator& a, const LinearOperator& b);
  [[nodiscard]] std::size_t rows() const override { return a_->rows(); }
  [[nodiscard]] std::size_t cols() const override { return a_->cols(); }
  void apply(double alpha, std::span<const double> x, std::span<double> y) const override;
  void apply_transposed(double alpha, std::span<const double> x, std::span<double> y) const override;

 private:
  const LinearOperator* a_;
  const LinearOperator* b_;
};

/// Power iteration on A^T A from a seeded random start; returns the
/// estimate of ||A||_2 (0 for the zero operator).
double power_iteration_norm2(const LinearOperator& op, int iterations, std::uint64_t seed = 0x5eed);

/// ||A - B||_2 via power iteration on the difference.
double spectral_error(const DenseMatrix& a, const DenseMatrix& b, int iterations = 100);

}  // namespace grh
