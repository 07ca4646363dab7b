#include "grh/pipeline.hpp"

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

namespace grh {

Method parse_method(std::string_view name) {
  if (name == "green") return Method::green;
  if (name == "hybrid") return Method::hybrid;
  if (name == "h2") return Method::h2;
  if (name == "aca") return Method::aca;
  if (name == "dense") return Method::dense;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::green: return "green";
    case Method::hybrid: return "hybrid";
    case Method::h2: return "h2";
    case Method::aca: return "aca";
    case Method::dense: return "dense";
  }
  return "unknown";
}

std::shared_ptr<const BlockTree> build_trees(const GalerkinOperator& op, const TreeOptions& opts) {
  auto rows = std::make_shared<const ClusterTree>(ClusterTree::build(op.row_space().support_boxes(), opts.leaf_size));
  auto cols = std::make_shared<const ClusterTree>(ClusterTree::build(op.col_space().support_boxes(), opts.leaf_size));
  return std::make_shared<const BlockTree>(BlockTree::build(rows, cols, opts.eta, true));
}

Compressed compress(const GalerkinOperator& op, Method method, const TreeOptions& trees, const BuildOptions& build) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  Compressed out;
  out.method = method;
  if (method == Method::dense) {
    auto dense = std::make_shared<DenseMatrixOperator>(op.assemble_dense(build.threads));
    out.storage.dofs = dense->rows();
    out.storage.nearfield_bytes = sizeof(double) * dense->matrix().size();
    out.storage.total_bytes = out.storage.nearfield_bytes;
    out.storage.bytes_per_dof = static_cast<double>(out.storage.total_bytes) / static_cast<double>(dense->rows());
    out.op = std::move(dense);
  } else {
    out.blocks = build_trees(op, trees);
    if (method == Method::h2) {
      auto h = std::make_shared<H2Matrix>(build_h2(op, out.blocks, build));
      out.storage = storage_report(*h);
      out.op = std::move(h);
    } else {
      HMatrix h = method == Method::green    ? build_h_green(op, out.blocks, build)
                  : method == Method::hybrid ? build_h_hybrid(op, out.blocks, build)
                                             : build_h_aca_baseline(op, out.blocks, build);
      out.storage = storage_report(h);
      out.op = std::make_shared<HMatrix>(std::move(h));
    }
  }
  out.build_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return out;
}

double time_matvec(const LinearOperator& op, int repeats) {
  std::vector<double> x(op.cols());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = 1.0 / static_cast<double>(j + 1);
  std::vector<double> y(op.rows());
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) op.apply(1.0, x, y);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / repeats;
}

}  // namespace grh
