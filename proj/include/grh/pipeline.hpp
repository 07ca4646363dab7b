#pragma once

// Glue between the modules: trees for an operator, compression by method
// name, setup timing.

#include <cstddef>
#include <memory>
#include <string_view>
#include <utility>

#include "grh/bem.hpp"
#include "grh/cluster.hpp"
#include "grh/densela.hpp"
#include "grh/hierarchy.hpp"

namespace grh {

enum class Method { green, hybrid, h2, aca, dense };

/// Throws std::invalid_argument for unknown names.
Method parse_method(std::string_view name);
const char* to_string(Method m);

struct TreeOptions {
  double eta = 1.0;
  std::size_t leaf_size = 16;
};

/// Strictly admissible block tree over the test (rows) and trial
/// (columns) supports of `op`.
std::shared_ptr<const BlockTree> build_trees(const GalerkinOperator& op, const TreeOptions& opts);

/// Owns its matrix, unlike DenseOperator.
class DenseMatrixOperator final : public LinearOperator {
 public:
  explicit DenseMatrixOperator(DenseMatrix a) : a_(std::move(a)) {}
  [[nodiscard]] std::size_t rows() const override { return a_.rows(); }
  [[nodiscard]] std::size_t cols() const override { return a_.cols(); }
  void apply(double alpha, std::span<const double> x, std::span<double> y) const override { gemv(alpha, a_, x, y); }
  void apply_transposed(double alpha, std::span<const double> x, std::span<double> y) const override {
    gemv_transposed(alpha, a_, x, y);
  }
  [[nodiscard]] const DenseMatrix& matrix() const { return a_; }

 private:
  DenseMatrix a_;
};

struct Compressed {
  Method method = Method::dense;
  std::shared_ptr<const BlockTree> blocks;
  std::shared_ptr<const LinearOperator> op;
  StorageReport storage;
  /// Tree construction and assembly.
  double build_seconds = 0.0;

  [[nodiscard]] const HMatrix* hmatrix() const { return dynamic_cast<const HMatrix*>(op.get()); }
  [[nodiscard]] const H2Matrix* h2matrix() const { return dynamic_cast<const H2Matrix*>(op.get()); }
};

Compressed compress(const GalerkinOperator& op, Method method, const TreeOptions& trees, const BuildOptions& build);

/// Seconds per application of op to a fixed vector, averaged over `repeats`.
double time_matvec(const LinearOperator& op, int repeats = 3);

}  // namespace grh
