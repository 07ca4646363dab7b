#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "grh/vec3.hpp"

namespace grh {

inline constexpr std::size_t kNoCluster = static_cast<std::size_t>(-1);

/// Node of a binary cluster tree. The index set is the range
/// [begin, end) of the tree's permutation.
struct Cluster {
  std::size_t begin = 0;
  std::size_t end = 0;
  Box box;
  std::array<std::size_t, 2> sons{kNoCluster, kNoCluster};
  std::size_t parent = kNoCluster;
  std::size_t level = 0;

  [[nodiscard]] bool is_leaf() const { return sons[0] == kNoCluster; }
  [[nodiscard]] std::size_t size() const { return end - begin; }
};

class ClusterTree {
 public:
  /// Recursive bisection at the midpoint of the longest box axis, keyed
  /// on support-box centers; falls back to halving by count when the
  /// midpoint does not separate. Boxes are tight over the supports.
  static ClusterTree build(std::vector<Box> supports, std::size_t leaf_size);

  [[nodiscard]] std::size_t root() const { return 0; }
  [[nodiscard]] std::size_t cluster_count() const { return clusters_.size(); }
  [[nodiscard]] std::size_t index_count() const { return permutation_.size(); }
  [[nodiscard]] std::size_t leaf_size() const { return leaf_size_; }

  [[nodiscard]] const Cluster& cluster(std::size_t id) const { return clusters_[id]; }
  [[nodiscard]] const std::vector<Cluster>& clusters() const { return clusters_; }

  /// Global indices of cluster `id`, in tree order.
  [[nodiscard]] std::span<const std::size_t> indices(std::size_t id) const {
    const auto& c = clusters_[id];
    return {permutation_.data() + c.begin, c.size()};
  }
  /// Tree position -> global index.
  [[nodiscard]] std::span<const std::size_t> permutation() const { return permutation_; }
  [[nodiscard]] const Box& support(std::size_t index) const { return supports_[index]; }
  [[nodiscard]] std::span<const Box> supports() const { return supports_; }

  /// Cluster ids with sons before parents.
  [[nodiscard]] const std::vector<std::size_t>& postorder() const { return postorder_; }
  [[nodiscard]] std::vector<std::size_t> leaves() const;
  [[nodiscard]] std::size_t depth() const;

 private:
  std::vector<Cluster> clusters_;
  std::vector<std::size_t> permutation_;
  std::vector<Box> supports_;
  std::vector<std::size_t> postorder_;
  std::size_t leaf_size_ = 0;
};

/// max{diam(B_t), diam(B_s)} <= eta * dist(B_t, B_s) in the maximum norm.
/// Touching or overlapping boxes are never admissible.
bool admissible(const Box& t, const Box& s, double eta);

struct Block {
  std::size_t row = 0;
  std::size_t col = 0;
  bool admissible = false;
  std::vector<std::size_t> sons;
  [[nodiscard]] bool is_leaf() const { return sons.empty(); }
};

class BlockTree {
 public:
  /// Minimal admissible block tree. With `strict`, inadmissible leaves
  /// have leaf clusters on both sides; otherwise on at least one side.
  static BlockTree build(std::shared_ptr<const ClusterTree> rows, std::shared_ptr<const ClusterTree> cols, double eta,
                         bool strict = true);

  [[nodiscard]] const ClusterTree& row_tree() const { return *rows_; }
  [[nodiscard]] const ClusterTree& col_tree() const { return *cols_; }
  [[nodiscard]] std::shared_ptr<const ClusterTree> row_tree_ptr() const { return rows_; }
  [[nodiscard]] std::shared_ptr<const ClusterTree> col_tree_ptr() const { return cols_; }

  [[nodiscard]] std::size_t root() const { return 0; }
  [[nodiscard]] const Block& block(std::size_t id) const { return blocks_[id]; }
  [[nodiscard]] std::size_t block_count() const { return blocks_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& leaves() const { return leaves_; }
  [[nodiscard]] const std::vector<std::size_t>& admissible_leaves() const { return admissible_leaves_; }
  [[nodiscard]] const std::vector<std::size_t>& inadmissible_leaves() const { return inadmissible_leaves_; }
  [[nodiscard]] double eta() const { return eta_; }
  [[nodiscard]] bool strict() const { return strict_; }

  /// Number of index pairs covered by admissible leaves.
  [[nodiscard]] std::size_t admissible_pair_count() const;

 private:
  std::shared_ptr<const ClusterTree> rows_;
  std::shared_ptr<const ClusterTree> cols_;
  std::vector<Block> blocks_;
  std::vector<std::size_t> leaves_;
  std::vector<std::size_t> admissible_leaves_;
  std::vector<std::size_t> inadmissible_leaves_;
  double eta_ = 1.0;
  bool strict_ = true;
};

/// Indices whose support box lies in { y : diam(B_t) <= dist(B_t, y) }.
std::vector<std::size_t> farfield_indices(const Box& cluster_box, std::span<const Box> supports);

}  // namespace grh
