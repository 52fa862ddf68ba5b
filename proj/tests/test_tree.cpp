#include "oracles.hpp"

#include "leaftree/binary_tree.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using leaftree::BinaryTree;

namespace {

BinaryTree cherry() { return BinaryTree::node(BinaryTree::leaf(), BinaryTree::leaf()); }

int ceil_log2(int n) {
  int h = 0;
  while ((1 << h) < n) ++h;
  return h;
}

}  // namespace

TEST_CASE("height of small trees") {
  CHECK(leaftree::height(BinaryTree::leaf()) == 0);
  CHECK(leaftree::height(cherry()) == 1);
  CHECK(leaftree::height(BinaryTree::node(cherry(), BinaryTree::leaf())) == 2);
  CHECK(leaftree::height(BinaryTree::node(cherry(), cherry())) == 2);
}

TEST_CASE("structure accessors") {
  const auto t = BinaryTree::node(cherry(), BinaryTree::leaf());
  CHECK(t.size() == 3);
  CHECK(t.node_count() == 5);
  CHECK_FALSE(t.is_leaf());
  CHECK(t.left() == cherry());
  CHECK(t.right() == BinaryTree::leaf());
  CHECK(leaftree::to_bracket_string(t) == "((..).)");
  std::ostringstream os;
  os << t;
  CHECK(os.str() == "((..).)");
}

TEST_CASE("shape code round trip") {
  for (int n = 1; n <= 7; ++n) {
    for (const auto& t : leaftree::enumerate_trees(n)) {
      CHECK(BinaryTree::from_shape_code(t.shape_code()) == t);
      std::vector<std::uint32_t> sizes(t.sizes().begin(), t.sizes().end());
      CHECK(BinaryTree::from_preorder_sizes(sizes) == t);
    }
  }
  CHECK_THROWS(BinaryTree::from_shape_code("10"));
  CHECK_THROWS(BinaryTree::from_shape_code("1002"));
  CHECK_THROWS(BinaryTree::from_shape_code(""));
  CHECK_THROWS(BinaryTree::from_preorder_sizes({3, 1, 1}));
}

TEST_CASE("enumeration examples") {
  const auto one = leaftree::enumerate_trees(1);
  REQUIRE(one.size() == 1);
  CHECK(one.front().is_leaf());
  CHECK(leaftree::enumerate_trees(3).size() == 2);
  CHECK(leaftree::enumerate_trees(4).size() == 5);
  CHECK_THROWS_AS(leaftree::enumerate_trees(0), std::out_of_range);
  CHECK_THROWS_AS(leaftree::enumerate_trees(leaftree::kMaxEnumerationSize + 1), std::out_of_range);
}

TEST_CASE("enumeration order is by left subtree size") {
  const auto trees = leaftree::enumerate_trees(4);
  std::vector<std::size_t> left_sizes;
  for (const auto& t : trees) left_sizes.push_back(t.left().size());
  CHECK(std::is_sorted(left_sizes.begin(), left_sizes.end()));
  CHECK(leaftree::to_bracket_string(trees.front()) == "(.(.(..)))");
}

TEST_CASE("tree counts") {
  CHECK(leaftree::count_trees(1) == 1);
  CHECK(leaftree::count_trees(4) == 5);
  CHECK(leaftree::count_trees(10) == 4862);
  CHECK(leaftree::enumerate_trees(10).size() == 4862);
  for (int n = 1; n <= 30; ++n) {
    CHECK(leaftree::count_trees(n) == oracle::catalan(n - 1));
  }
  // C_99, well past 64 bits.
  CHECK(leaftree::catalan(99).str() ==
        "227508830794229349661819540395688853956041682601541047340");
}

TEST_CASE("enumeration is complete and duplicate free") {
  for (int n = 1; n <= 12; ++n) {
    std::set<std::string> codes;
    std::size_t visited = 0;
    leaftree::for_each_tree(n, [&](const BinaryTree& t) {
      CHECK(t.size() == static_cast<std::size_t>(n));
      codes.insert(t.shape_code());
      ++visited;
    });
    CHECK(visited == leaftree::count_trees(n));
    CHECK(codes.size() == visited);
  }
}

TEST_CASE("height extremes") {
  for (int n = 1; n <= 12; ++n) {
    int lo = n, hi = -1;
    leaftree::for_each_tree(n, [&](const BinaryTree& t) {
      const int h = leaftree::height(t);
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    });
    CHECK(lo >= ceil_log2(n));
    CHECK(hi == n - 1);
    if ((n & (n - 1)) == 0) CHECK(lo == ceil_log2(n));
  }
}

TEST_CASE("catalan recurrence") {
  for (int n = 2; n <= 40; ++n) {
    leaftree::BigInt sum = 0;
    for (int i = 1; i < n; ++i) sum += leaftree::count_trees(i) * leaftree::count_trees(n - i);
    CHECK(sum == leaftree::count_trees(n));
  }
}

TEST_CASE("deep trees do not recurse") {
  std::string comb;
  for (int k = 0; k < 200000; ++k) comb += '1';
  for (int k = 0; k <= 200000; ++k) comb += '0';
  const auto t = BinaryTree::from_shape_code(comb);
  CHECK(t.size() == 200001);
  CHECK(leaftree::height(t) == 200000);
}
