#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leaftree {

using BigInt = boost::multiprecision::cpp_int;

// Largest n accepted by the exhaustive enumerators.
inline constexpr int kMaxEnumerationSize = 15;

// A full binary tree, stored as the pre-order sequence of subtree leaf counts.
//
// The node at pre-order index i is a leaf iff sizes()[i] == 1. Otherwise its
// left child sits at i + 1 and its right child at i + 2 * sizes()[i + 1], since
// a subtree with k leaves occupies 2k - 1 consecutive slots. Trees are values:
// copying is O(nodes) and no operation mutates an existing tree.
class BinaryTree {
 public:
  // A single leaf.
  BinaryTree();

  static BinaryTree leaf() { return BinaryTree(); }
  static BinaryTree node(const BinaryTree& left, const BinaryTree& right);

  // Throws std::invalid_argument unless `sizes` describes a full binary tree.
  static BinaryTree from_preorder_sizes(std::vector<std::uint32_t> sizes);

  // Pre-order code: '1' for an inner node, '0' for a leaf. "100" is Node(Leaf, Leaf).
  static BinaryTree from_shape_code(std::string_view code);
  std::string shape_code() const;

  // Number of leaves.
  std::size_t size() const { return sizes_.front(); }
  std::size_t node_count() const { return sizes_.size(); }
  bool is_leaf() const { return sizes_.size() == 1; }

  // Subtree copies; throw std::logic_error on a leaf.
  BinaryTree left() const;
  BinaryTree right() const;

  std::span<const std::uint32_t> sizes() const { return sizes_; }

  static std::size_t right_child(std::span<const std::uint32_t> sizes, std::size_t i) {
    return i + 2 * static_cast<std::size_t>(sizes[i + 1]);
  }

  friend bool operator==(const BinaryTree&, const BinaryTree&) = default;

 private:
  struct Unchecked {};
  BinaryTree(Unchecked, std::vector<std::uint32_t> sizes) : sizes_(std::move(sizes)) {}

  std::vector<std::uint32_t> sizes_;
};

// Edge count of the longest root-to-leaf path; 0 for a leaf. Iterative, so
// comb-shaped trees of any size are fine.
int height(const BinaryTree& t);

// Nested form, e.g. "((..).)" for Node(Node(Leaf, Leaf), Leaf).
std::string to_bracket_string(const BinaryTree& t);
std::ostream& operator<<(std::ostream& os, const BinaryTree& t);

// Visits every tree of T_n once: left-subtree size ascending, then the left
// subtree's order, then the right subtree's order. 1 <= n <= 15.
void for_each_tree(int n, const std::function<void(const BinaryTree&)>& visit);
std::vector<BinaryTree> enumerate_trees(int n);

// |T_n| = Catalan(n - 1), exact.
BigInt count_trees(int n);
BigInt catalan(int m);

}  // namespace leaftree
