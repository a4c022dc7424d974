#ifndef CAUSAL_RESAMPLE_VERTEX_SET_HPP
#define CAUSAL_RESAMPLE_VERTEX_SET_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace causal_resample {

// Fixed-capacity bitset over vertex indices, hashable so it can key score caches.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int capacity) : words_((capacity + 63) / 64, 0) {}

  void insert(int v) { words_[v >> 6] |= bit(v); }
  void erase(int v) { words_[v >> 6] &= ~bit(v); }
  bool contains(int v) const { return (words_[v >> 6] & bit(v)) != 0; }

  int size() const {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }
  bool empty() const { return size() == 0; }

  // Members in ascending order.
  std::vector<int> members() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w != 0) {
        out.push_back(static_cast<int>(i * 64) + std::countr_zero(w));
        w &= w - 1;
      }
    }
    return out;
  }

  std::size_t hash() const {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (auto w : words_) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }

  bool operator==(const VertexSet&) const = default;

 private:
  static std::uint64_t bit(int v) { return std::uint64_t{1} << (v & 63); }

  std::vector<std::uint64_t> words_;
};

}  // namespace causal_resample

#endif  // CAUSAL_RESAMPLE_VERTEX_SET_HPP
