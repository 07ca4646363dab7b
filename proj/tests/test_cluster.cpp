#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "grh/bem.hpp"
#include "grh/cluster.hpp"
#include "support.hpp"

using namespace grh;

namespace {

Box box(Vec3 lo, Vec3 hi) { return Box{lo, hi}; }

bool contains(const Box& outer, const Box& inner) {
  for (int k = 0; k < 3; ++k)
    if (inner.lo[k] < outer.lo[k] || inner.hi[k] > outer.hi[k]) return false;
  return true;
}

// Traversal oracle: leaves partition the root's indices, sons partition
// their parent, boxes are tight.
void check_tree(const ClusterTree& tree, std::size_t leaf_size) {
  std::vector<int> hits(tree.index_count(), 0);
  for (std::size_t id = 0; id < tree.cluster_count(); ++id) {
    const Cluster& c = tree.cluster(id);
    Box tight;
    for (std::size_t i : tree.indices(id)) tight.extend(tree.support(i));
    CHECK(tight.lo == c.box.lo);
    CHECK(tight.hi == c.box.hi);
    if (c.is_leaf()) {
      CHECK(c.size() <= leaf_size);
      for (std::size_t i : tree.indices(id)) ++hits[i];
    } else {
      CHECK(c.size() > leaf_size);
      const Cluster& a = tree.cluster(c.sons[0]);
      const Cluster& b = tree.cluster(c.sons[1]);
      CHECK(a.begin == c.begin);
      CHECK(a.end == b.begin);
      CHECK(b.end == c.end);
      CHECK(a.size() > 0);
      CHECK(b.size() > 0);
      CHECK(a.parent == id);
      CHECK(contains(c.box, a.box));
    }
  }
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

std::shared_ptr<const ClusterTree> make_tree(std::vector<Box> supports, std::size_t leaf) {
  return std::make_shared<const ClusterTree>(ClusterTree::build(std::move(supports), leaf));
}

}  // namespace

TEST_CASE("cluster trees") {
  SUBCASE("single index") {
    const Box b = box({0, 0, 0}, {1, 2, 3});
    const auto t = ClusterTree::build({b}, 16);
    CHECK(t.cluster_count() == 1);
    CHECK(t.cluster(0).is_leaf());
    CHECK(t.cluster(0).box.hi == b.hi);
  }
  SUBCASE("octahedron") {
    const auto mesh = grh::test::sphere(0);
    const FunctionSpace space(mesh, SpaceKind::constant);
    const auto t = ClusterTree::build(space.support_boxes(), 2);
    CHECK(t.depth() >= 2);
    check_tree(t, 2);
  }
  SUBCASE("sphere level 4") {
    const auto mesh = grh::test::sphere(4);
    for (auto kind : {SpaceKind::constant, SpaceKind::linear}) {
      const FunctionSpace space(mesh, kind);
      const auto t = ClusterTree::build(space.support_boxes(), 16);
      check_tree(t, 16);
      const auto post = t.postorder();
      std::vector<std::size_t> seen(t.cluster_count(), 0);
      for (std::size_t k = 0; k < post.size(); ++k) {
        const Cluster& c = t.cluster(post[k]);
        if (!c.is_leaf()) CHECK((seen[c.sons[0]] && seen[c.sons[1]]));
        seen[post[k]] = 1;
      }
    }
  }
  SUBCASE("coincident supports fall back to halving") {
    std::vector<Box> same(37, box({0.5, 0.5, 0.5}, {0.6, 0.6, 0.6}));
    const auto t = ClusterTree::build(same, 4);
    check_tree(t, 4);
  }
}

TEST_CASE("admissibility") {
  const Box a = box({0, 0, 0}, {1, 1, 1});
  const Box b = box({2, 2, 2}, {3, 3, 3});
  CHECK_FALSE(admissible(a, a, 1.0));
  CHECK(admissible(a, b, 1.0));
  CHECK_FALSE(admissible(a, b, 0.5));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0), w(0.1, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const Vec3 p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
    const Box s = box(p, p + Vec3{w(rng), w(rng), w(rng)});
    const Box t = box(q, q + Vec3{w(rng), w(rng), w(rng)});
    if (admissible(s, t, 1.0)) CHECK(admissible(s, t, 2.0));
  }
}

TEST_CASE("block trees") {
  SUBCASE("single leaf") {
    auto t = make_tree({box({0, 0, 0}, {1, 1, 1})}, 16);
    const auto bt = BlockTree::build(t, t, 1.0);
    CHECK(bt.leaves().size() == 1);
    CHECK_FALSE(bt.block(bt.leaves()[0]).admissible);
  }
  SUBCASE("far leaves") {
    auto r = make_tree({box({0, 0, 0}, {1, 1, 1})}, 16);
    auto c = make_tree({box({5, 5, 5}, {6, 6, 6})}, 16);
    const auto bt = BlockTree::build(r, c, 1.0);
    CHECK(bt.leaves().size() == 1);
    CHECK(bt.block(bt.root()).admissible);
  }
  SUBCASE("sphere partition") {
    const auto mesh = grh::test::sphere(4);
    const FunctionSpace rows(mesh, SpaceKind::constant), cols(mesh, SpaceKind::linear);
    auto rt = make_tree(rows.support_boxes(), 16);
    auto ct = make_tree(cols.support_boxes(), 16);
    for (bool strict : {true, false}) {
      const auto bt = BlockTree::build(rt, ct, 2.0, strict);
      std::vector<unsigned char> covered(rows.size() * cols.size(), 0);
      std::size_t total = 0;
      for (std::size_t id : bt.leaves()) {
        const Block& b = bt.block(id);
        const Cluster& t = rt->cluster(b.row);
        const Cluster& s = ct->cluster(b.col);
        total += t.size() * s.size();
        for (std::size_t i : rt->indices(b.row))
          for (std::size_t j : ct->indices(b.col)) ++covered[i * cols.size() + j];
        CHECK(b.admissible == admissible(t.box, s.box, 2.0));
        if (!b.admissible) {
          if (strict)
            CHECK((t.is_leaf() && s.is_leaf()));
          else
            CHECK((t.is_leaf() || s.is_leaf()));
        }
      }
      CHECK(total == rows.size() * cols.size());
      CHECK(std::all_of(covered.begin(), covered.end(), [](unsigned char c) { return c == 1; }));
    }
  }
  SUBCASE("three-case split") {
    const auto mesh = grh::test::sphere(3);
    const FunctionSpace space(mesh, SpaceKind::constant);
    auto t = make_tree(space.support_boxes(), 16);
    const auto bt = BlockTree::build(t, t, 1.0);
    for (std::size_t id = 0; id < bt.block_count(); ++id) {
      const Block& b = bt.block(id);
      if (b.is_leaf()) continue;
      const Cluster& r = t->cluster(b.row);
      const Cluster& c = t->cluster(b.col);
      CHECK_FALSE(b.admissible);
      const std::size_t expected = (r.is_leaf() ? 1 : 2) * (c.is_leaf() ? 1 : 2);
      CHECK(b.sons.size() == expected);
    }
  }
}

TEST_CASE("farfield") {
  const auto mesh = grh::test::sphere(3);
  const FunctionSpace rows(mesh, SpaceKind::constant), cols(mesh, SpaceKind::linear);
  auto rt = make_tree(rows.support_boxes(), 16);
  auto ct = make_tree(cols.support_boxes(), 16);
  CHECK(farfield_indices(rt->cluster(rt->root()).box, cols.support_boxes()).empty());

  // a leaf near (1,0,0) and the vertex at (-1,0,0)
  std::size_t leaf = kNoCluster;
  for (std::size_t id : rt->leaves())
    if (rt->cluster(id).box.lo[0] > 0.8) leaf = id;
  REQUIRE(leaf != kNoCluster);
  std::size_t opposite = 0;
  for (std::size_t v = 0; v < mesh->vertex_count(); ++v)
    if (mesh->vertex(v)[0] < mesh->vertex(opposite)[0]) opposite = v;
  const auto far = farfield_indices(rt->cluster(leaf).box, cols.support_boxes());
  CHECK(std::find(far.begin(), far.end(), opposite) != far.end());

  const auto bt = BlockTree::build(rt, ct, 1.0);
  for (std::size_t id : bt.admissible_leaves()) {
    const Block& b = bt.block(id);
    auto f = farfield_indices(rt->cluster(b.row).box, cols.support_boxes());
    std::sort(f.begin(), f.end());
    for (std::size_t j : ct->indices(b.col)) CHECK(std::binary_search(f.begin(), f.end(), j));
  }
}
