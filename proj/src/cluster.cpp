#include "grh/cluster.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace grh {

namespace {

struct Builder {
  std::vector<Cluster>& clusters;
  std::vector<std::size_t>& perm;
  const std::vector<Box>& supports;
  std::size_t leaf_size;

  Box box_of(std::size_t begin, std::size_t end) const {
    Box b;
    for (std::size_t k = begin; k < end; ++k) b.extend(supports[perm[k]]);
    return b;
  }

  std::size_t build(std::size_t begin, std::size_t end, std::size_t parent, std::size_t level) {
    const std::size_t id = clusters.size();
    clusters.push_back(Cluster{begin, end, box_of(begin, end), {kNoCluster, kNoCluster}, parent, level});
    if (end - begin <= leaf_size) return id;

    const Box box = clusters[id].box;
    const int axis = box.longest_axis();
    const double mid = box.center(axis);
    auto first = perm.begin() + static_cast<std::ptrdiff_t>(begin);
    auto last = perm.begin() + static_cast<std::ptrdiff_t>(end);
    auto split = std::stable_partition(first, last, [&](std::size_t i) { return supports[i].center(axis) < mid; });
    if (split == first || split == last) {
      std::stable_sort(first, last, [&](std::size_t a, std::size_t b) {
        return supports[a].center(axis) < supports[b].center(axis);
      });
      split = first + static_cast<std::ptrdiff_t>((end - begin) / 2);
    }
    const std::size_t middle = begin + static_cast<std::size_t>(split - first);
    const std::size_t left = build(begin, middle, id, level + 1);
    const std::size_t right = build(middle, end, id, level + 1);
    clusters[id].sons = {left, right};
    return id;
  }
};

void collect_postorder(const std::vector<Cluster>& clusters, std::size_t id, std::vector<std::size_t>& out) {
  if (!clusters[id].is_leaf()) {
    collect_postorder(clusters, clusters[id].sons[0], out);
    collect_postorder(clusters, clusters[id].sons[1], out);
  }
  out.push_back(id);
}

}  // namespace

ClusterTree ClusterTree::build(std::vector<Box> supports, std::size_t leaf_size) {
  if (supports.empty()) throw std::invalid_argument("cluster tree needs at least one index");
  if (leaf_size == 0) throw std::invalid_argument("leaf size must be positive");
  ClusterTree tree;
  tree.leaf_size_ = leaf_size;
  tree.supports_ = std::move(supports);
  tree.permutation_.resize(tree.supports_.size());
  std::iota(tree.permutation_.begin(), tree.permutation_.end(), std::size_t{0});
  Builder builder{tree.clusters_, tree.permutation_, tree.supports_, leaf_size};
  builder.build(0, tree.permutation_.size(), kNoCluster, 0);
  tree.postorder_.reserve(tree.clusters_.size());
  collect_postorder(tree.clusters_, 0, tree.postorder_);
  return tree;
}

std::vector<std::size_t> ClusterTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t id = 0; id < clusters_.size(); ++id)
    if (clusters_[id].is_leaf()) out.push_back(id);
  return out;
}

std::size_t ClusterTree::depth() const {
  std::size_t d = 0;
  for (const auto& c : clusters_) d = std::max(d, c.level);
  return d;
}

bool admissible(const Box& t, const Box& s, double eta) {
  const double dist = dist_inf(t, s);
  if (!(dist > 0.0)) return false;
  return std::max(t.diam_inf(), s.diam_inf()) <= eta * dist;
}

BlockTree BlockTree::build(std::shared_ptr<const ClusterTree> rows, std::shared_ptr<const ClusterTree> cols,
                           double eta, bool strict) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  BlockTree tree;
  tree.rows_ = std::move(rows);
  tree.cols_ = std::move(cols);
  tree.eta_ = eta;
  tree.strict_ = strict;

  std::vector<std::size_t> stack{0};
  tree.blocks_.push_back(Block{tree.rows_->root(), tree.cols_->root(), false, {}});
  // Breadth of the recursion is handled by an explicit stack; block ids
  // are assigned in creation order.
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    const Cluster& t = tree.rows_->cluster(tree.blocks_[id].row);
    const Cluster& s = tree.cols_->cluster(tree.blocks_[id].col);
    if (admissible(t.box, s.box, eta)) {
      tree.blocks_[id].admissible = true;
      continue;
    }
    const bool stop = strict ? (t.is_leaf() && s.is_leaf()) : (t.is_leaf() || s.is_leaf());
    if (stop) continue;

    std::vector<std::size_t> row_sons;
    std::vector<std::size_t> col_sons;
    if (t.is_leaf())
      row_sons = {tree.blocks_[id].row};
    else
      row_sons = {t.sons[0], t.sons[1]};
    if (s.is_leaf())
      col_sons = {tree.blocks_[id].col};
    else
      col_sons = {s.sons[0], s.sons[1]};

    std::vector<std::size_t> sons;
    for (std::size_t r : row_sons)
      for (std::size_t c : col_sons) {
        sons.push_back(tree.blocks_.size());
        tree.blocks_.push_back(Block{r, c, false, {}});
      }
    tree.blocks_[id].sons = sons;
    for (auto it = sons.rbegin(); it != sons.rend(); ++it) stack.push_back(*it);
  }

  for (std::size_t id = 0; id < tree.blocks_.size(); ++id) {
    if (!tree.blocks_[id].is_leaf()) continue;
    tree.leaves_.push_back(id);
    (tree.blocks_[id].admissible ? tree.admissible_leaves_ : tree.inadmissible_leaves_).push_back(id);
  }
  return tree;
}

std::size_t BlockTree::admissible_pair_count() const {
  std::size_t count = 0;
  for (std::size_t id : admissible_leaves_)
    count += rows_->cluster(blocks_[id].row).size() * cols_->cluster(blocks_[id].col).size();
  return count;
}

std::vector<std::size_t> farfield_indices(const Box& cluster_box, std::span<const Box> supports) {
  const double diam = cluster_box.diam_inf();
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < supports.size(); ++j)
    if (dist_inf(cluster_box, supports[j]) >= diam) out.push_back(j);
  return out;
}

}  // namespace grh
