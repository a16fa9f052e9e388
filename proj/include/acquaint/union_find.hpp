#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace acquaint {

// Disjoint sets with union by size and path halving. Besides the partition it
// keeps the statistics the engine reads every step: number of classes, number
// of singleton classes and the largest class size.
class UnionFind {
 public:
  UnionFind() = default;

  explicit UnionFind(std::uint32_t count)
      : parent_(count), size_(count, 1), classes_(count), singletons_(count), largest_(count > 0 ? 1 : 0) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns true when two distinct classes were merged.
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    singletons_ -= (size_[a] == 1) + (size_[b] == 1);
    parent_[b] = a;
    size_[a] += size_[b];
    if (size_[a] > largest_) largest_ = size_[a];
    --classes_;
    return true;
  }

  bool same(std::uint32_t a, std::uint32_t b) { return find(a) == find(b); }

  std::uint32_t class_size(std::uint32_t x) { return size_[find(x)]; }
  std::uint32_t element_count() const { return static_cast<std::uint32_t>(parent_.size()); }
  std::uint32_t class_count() const { return classes_; }
  std::uint32_t singleton_count() const { return singletons_; }
  std::uint32_t largest_class() const { return largest_; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::uint32_t classes_ = 0;
  std::uint32_t singletons_ = 0;
  std::uint32_t largest_ = 0;
};

}  // namespace acquaint
