#pragma once

#include <numeric>
#include <utility>
#include <vector>

namespace ercomp {

// Disjoint sets over 0..n-1, union by size with path compression.
class UnionFind {
 public:
  explicit UnionFind(int n = 0) { reset(n); }

  void reset(int n) {
    parent_.resize(static_cast<std::size_t>(n));
    size_.assign(static_cast<std::size_t>(n), 1);
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int size() const noexcept { return static_cast<int>(parent_.size()); }

  int find(int v) noexcept {
    int root = v;
    while (parent_[static_cast<std::size_t>(root)] != root) root = parent_[static_cast<std::size_t>(root)];
    while (parent_[static_cast<std::size_t>(v)] != root) {
      const int next = parent_[static_cast<std::size_t>(v)];
      parent_[static_cast<std::size_t>(v)] = root;
      v = next;
    }
    return root;
  }

  // Returns false if a and b were already joined.
  bool unite(int a, int b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    return true;
  }

  int component_size(int v) noexcept { return size_[static_cast<std::size_t>(find(v))]; }

  bool is_root(int v) const noexcept { return parent_[static_cast<std::size_t>(v)] == v; }
  int root_size(int root) const noexcept { return size_[static_cast<std::size_t>(root)]; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

}  // namespace ercomp
