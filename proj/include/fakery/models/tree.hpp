#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fakery {

// Binary decision tree stored as a flat node array in preorder. A node with
// feature < 0 is a leaf. Rows with x[feature] <= threshold go left.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;

  std::size_t leaf_index(auto x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      i = static_cast<double>(x[static_cast<std::size_t>(n.feature)]) <= n.threshold ? n.left : n.right;
    }
    return i;
  }

  template <class T>
  double predict(std::span<const T> x) const {
    return nodes[leaf_index(x)].value;
  }

  std::size_t leaf_count() const noexcept {
    std::size_t k = 0;
    for (const auto& n : nodes) k += n.is_leaf();
    return k;
  }

  // Renumbers nodes into preorder (root, left subtree, right subtree).
  void to_preorder() {
    std::vector<TreeNode> out;
    out.reserve(nodes.size());
    auto visit = [&](auto&& self, std::uint32_t i) -> std::uint32_t {
      const auto pos = static_cast<std::uint32_t>(out.size());
      out.push_back(nodes[i]);
      if (!nodes[i].is_leaf()) {
        const auto l = self(self, nodes[i].left);
        const auto r = self(self, nodes[i].right);
        out[pos].left = l;
        out[pos].right = r;
      }
      return pos;
    };
    if (!nodes.empty()) visit(visit, 0);
    nodes = std::move(out);
  }

  friend bool operator==(const Tree&, const Tree&) = default;
};

}  // namespace fakery
