#include "grh/densela.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace grh {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("dimension mismatch: ") + what);
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::row_range(std::size_t first, std::size_t count) const {
  require(first + count <= rows_, "row_range");
  DenseMatrix r(count, cols_);
  std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(first * cols_), count * cols_, r.values_.begin());
  return r;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> rows) const {
  DenseMatrix r(rows.size(), cols_);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    require(rows[k] < rows_, "select_rows");
    std::copy_n(row(rows[k]).begin(), cols_, r.row(k).begin());
  }
  return r;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
  a -= b;
  return a;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

DenseMatrix matmul_transposed(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), "matmul_transposed");
  DenseMatrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto bj = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += ai[k] * bj[k];
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix transposed_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "transposed_matmul");
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto ak = a.row(k);
    auto bk = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = ak[i];
      if (aki == 0.0) continue;
      auto ci = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

void gemv(double alpha, const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  require(x.size() == a.cols() && y.size() == a.rows(), "gemv");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
    y[i] += alpha * s;
  }
}

void gemv_transposed(double alpha, const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  require(x.size() == a.rows() && y.size() == a.cols(), "gemv_transposed");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = alpha * x[i];
    if (xi == 0.0) continue;
    auto ai = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * ai[j];
  }
}

DenseMatrix forward_substitution(const DenseMatrix& lower, const DenseMatrix& rhs) {
  require(lower.rows() == lower.cols() && lower.rows() == rhs.rows(), "forward_substitution");
  DenseMatrix x = rhs;
  for (std::size_t i = 0; i < lower.rows(); ++i) {
    auto xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = lower(i, k);
      if (lik == 0.0) continue;
      auto xk = x.row(k);
      for (std::size_t j = 0; j < x.cols(); ++j) xi[j] -= lik * xk[j];
    }
  }
  return x;
}

DenseMatrix solve_unit_lower_right(const DenseMatrix& lower, const DenseMatrix& rhs) {
  require(lower.rows() == lower.cols() && lower.rows() == rhs.cols(), "solve_unit_lower_right");
  const std::size_t n = lower.rows();
  DenseMatrix x = rhs;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto xr = x.row(r);
    for (std::size_t k = n; k-- > 0;) {
      double s = xr[k];
      for (std::size_t v = k + 1; v < n; ++v) s -= xr[v] * lower(v, k);
      xr[k] = s;
    }
  }
  return x;
}

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

DifferenceOperator::DifferenceOperator(const LinearOperator& a, const LinearOperator& b) : a_(&a), b_(&b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "DifferenceOperator");
}

void DifferenceOperator::apply(double alpha, std::span<const double> x, std::span<double> y) const {
  a_->apply(alpha, x, y);
  b_->apply(-alpha, x, y);
}

void DifferenceOperator::apply_transposed(double alpha, std::span<const double> x, std::span<double> y) const {
  a_->apply_transposed(alpha, x, y);
  b_->apply_transposed(-alpha, x, y);
}

double power_iteration_norm2(const LinearOperator& op, int iterations, std::uint64_t seed) {
  if (op.rows() == 0 || op.cols() == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(op.cols());
  for (double& v : x) v = dist(rng);
  std::vector<double> y(op.rows());
  double estimate = 0.0;
  double nx = norm2(x);
  for (int it = 0; it < iterations; ++it) {
    for (double& v : x) v /= nx;
    std::fill(y.begin(), y.end(), 0.0);
    op.apply(1.0, x, y);
    const double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    estimate = ny;
    std::fill(x.begin(), x.end(), 0.0);
    op.apply_transposed(1.0 / ny, y, x);
    nx = norm2(x);
    if (nx == 0.0) return estimate;
    // x = A^T A x_old / ||A x_old||, so ||x|| is a lower bound of ||A|| as well.
    estimate = std::max(estimate, nx);
  }
  return estimate;
}

double spectral_error(const DenseMatrix& a, const DenseMatrix& b, int iterations) {
  DenseOperator oa(a);
  DenseOperator ob(b);
  DifferenceOperator diff(oa, ob);
  return power_iteration_norm2(diff, iterations);
}

}  // namespace grh
