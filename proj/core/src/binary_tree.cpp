#include "leaftree/binary_tree.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace leaftree {

BinaryTree::BinaryTree() : sizes_{1} {}

BinaryTree BinaryTree::node(const BinaryTree& left, const BinaryTree& right) {
  std::vector<std::uint32_t> sizes;
  sizes.reserve(1 + left.sizes_.size() + right.sizes_.size());
  sizes.push_back(left.sizes_.front() + right.sizes_.front());
  sizes.insert(sizes.end(), left.sizes_.begin(), left.sizes_.end());
  sizes.insert(sizes.end(), right.sizes_.begin(), right.sizes_.end());
  return BinaryTree(Unchecked{}, std::move(sizes));
}

BinaryTree BinaryTree::from_preorder_sizes(std::vector<std::uint32_t> sizes) {
  if (sizes.empty()) throw std::invalid_argument("empty size sequence");
  const std::size_t leaves = sizes.front();
  if (leaves == 0 || sizes.size() != 2 * leaves - 1) {
    throw std::invalid_argument("size sequence length does not match leaf count");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::uint32_t s = sizes[i];
    if (s == 0) throw std::invalid_argument("zero subtree size");
    if (s == 1) continue;
    if (i + 1 >= sizes.size()) throw std::invalid_argument("inner node without children");
    const std::uint32_t l = sizes[i + 1];
    const std::size_t r = i + 2 * static_cast<std::size_t>(l);
    if (l >= s || r >= sizes.size() || sizes[r] != s - l) {
      throw std::invalid_argument("inconsistent subtree sizes at pre-order index " +
                                  std::to_string(i));
    }
  }
  return BinaryTree(Unchecked{}, std::move(sizes));
}

BinaryTree BinaryTree::from_shape_code(std::string_view code) {
  // Leaf counts come from a reverse scan: each '0' pushes 1, each '1' pops two.
  std::vector<std::uint32_t> sizes(code.size());
  std::vector<std::uint32_t> stack;
  for (std::size_t k = code.size(); k-- > 0;) {
    if (code[k] == '0') {
      sizes[k] = 1;
    } else if (code[k] == '1') {
      if (stack.size() < 2) throw std::invalid_argument("malformed shape code");
      const std::uint32_t l = stack.back();
      stack.pop_back();
      const std::uint32_t r = stack.back();
      stack.pop_back();
      sizes[k] = l + r;
    } else {
      throw std::invalid_argument("shape code may only contain '0' and '1'");
    }
    stack.push_back(sizes[k]);
  }
  if (stack.size() != 1) throw std::invalid_argument("malformed shape code");
  return from_preorder_sizes(std::move(sizes));
}

std::string BinaryTree::shape_code() const {
  std::string code(sizes_.size(), '0');
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] > 1) code[i] = '1';
  }
  return code;
}

BinaryTree BinaryTree::left() const {
  if (is_leaf()) throw std::logic_error("leaf has no children");
  const std::size_t len = 2 * static_cast<std::size_t>(sizes_[1]) - 1;
  return BinaryTree(Unchecked{}, {sizes_.begin() + 1, sizes_.begin() + 1 + len});
}

BinaryTree BinaryTree::right() const {
  if (is_leaf()) throw std::logic_error("leaf has no children");
  const std::size_t r = right_child(sizes_, 0);
  return BinaryTree(Unchecked{}, {sizes_.begin() + r, sizes_.end()});
}

int height(const BinaryTree& t) {
  const auto sizes = t.sizes();
  // Children have larger pre-order indices than their parent.
  std::vector<int> h(sizes.size(), 0);
  for (std::size_t i = sizes.size(); i-- > 0;) {
    if (sizes[i] == 1) continue;
    h[i] = 1 + std::max(h[i + 1], h[BinaryTree::right_child(sizes, i)]);
  }
  return h.front();
}

std::string to_bracket_string(const BinaryTree& t) {
  const auto sizes = t.sizes();
  std::string out;
  // Pending closing brackets per pre-order position.
  std::vector<std::uint32_t> closes;
  closes.reserve(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 1) {
      out.push_back('.');
      while (!closes.empty() && closes.back() == i) {
        out.push_back(')');
        closes.pop_back();
      }
    } else {
      out.push_back('(');
      // The subtree at i ends at index i + 2 * sizes[i] - 2.
      closes.push_back(static_cast<std::uint32_t>(i + 2 * sizes[i] - 2));
    }
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const BinaryTree& t) {
  return os << to_bracket_string(t);
}

namespace {

void check_enumeration_size(int n) {
  if (n < 1 || n > kMaxEnumerationSize) {
    throw std::out_of_range("tree enumeration requires 1 <= n <= " +
                            std::to_string(kMaxEnumerationSize) + ", got " +
                            std::to_string(n));
  }
}

// Appends pre-order sizes of each tree of size n to `buf`, then calls `done`.
void generate(std::uint32_t n, std::vector<std::uint32_t>& buf,
              const std::function<void()>& done) {
  buf.push_back(n);
  if (n == 1) {
    done();
  } else {
    for (std::uint32_t i = 1; i < n; ++i) {
      const std::function<void()> right = [&] { generate(n - i, buf, done); };
      generate(i, buf, right);
    }
  }
  buf.pop_back();
}

}  // namespace

void for_each_tree(int n, const std::function<void(const BinaryTree&)>& visit) {
  check_enumeration_size(n);
  std::vector<std::uint32_t> buf;
  buf.reserve(2 * static_cast<std::size_t>(n));
  generate(static_cast<std::uint32_t>(n), buf,
           [&] { visit(BinaryTree::from_preorder_sizes(buf)); });
}

std::vector<BinaryTree> enumerate_trees(int n) {
  std::vector<BinaryTree> out;
  for_each_tree(n, [&](const BinaryTree& t) { out.push_back(t); });
  return out;
}

BigInt catalan(int m) {
  if (m < 0) throw std::invalid_argument("catalan index must be nonnegative");
  BigInt c = 1;
  // C_{k+1} = C_k * 2(2k+1) / (k+2), exact at every step.
  for (int k = 0; k < m; ++k) {
    c = c * (2 * (2 * k + 1)) / (k + 2);
  }
  return c;
}

BigInt count_trees(int n) {
  if (n < 1) throw std::invalid_argument("tree size must be >= 1");
  return catalan(n - 1);
}

}  // namespace leaftree
