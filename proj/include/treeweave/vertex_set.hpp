#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace tw {

// Set of vertex ids within a fixed universe [0, n), stored as a bitset.
// All binary operations require matching universes.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int n) : n_(n), words_((n + 63) / 64, 0) {}

  static VertexSet full(int n) {
    VertexSet s(n);
    for (int i = 0; i < n; ++i) s.insert(i);
    return s;
  }
  static VertexSet of(int n, std::initializer_list<int> vs) {
    VertexSet s(n);
    for (int v : vs) s.insert(v);
    return s;
  }
  template <class It>
  static VertexSet from_range(int n, It begin, It end) {
    VertexSet s(n);
    for (It it = begin; it != end; ++it) s.insert(*it);
    return s;
  }
  static VertexSet from_vector(int n, const std::vector<int>& vs) {
    return from_range(n, vs.begin(), vs.end());
  }

  int universe() const { return n_; }

  bool contains(int v) const {
    return v >= 0 && v < n_ && (words_[v >> 6] >> (v & 63)) & 1;
  }
  void insert(int v) {
    check_range(v);
    words_[v >> 6] |= uint64_t{1} << (v & 63);
  }
  void erase(int v) {
    check_range(v);
    words_[v >> 6] &= ~(uint64_t{1} << (v & 63));
  }

  int count() const {
    int c = 0;
    for (uint64_t w : words_) c += std::popcount(w);
    return c;
  }
  bool empty() const {
    for (uint64_t w : words_) {
      if (w) return false;
    }
    return true;
  }

  int first() const {  // smallest member, -1 if empty
    for (size_t i = 0; i < words_.size(); ++i) {
      if (words_[i]) return static_cast<int>(i * 64 + std::countr_zero(words_[i]));
    }
    return -1;
  }

  VertexSet& operator|=(const VertexSet& o) {
    check_same(o);
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  VertexSet& operator&=(const VertexSet& o) {
    check_same(o);
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  VertexSet& operator-=(const VertexSet& o) {
    check_same(o);
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }

  bool intersects(const VertexSet& o) const {
    check_same(o);
    for (size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & o.words_[i]) return true;
    }
    return false;
  }
  bool is_subset_of(const VertexSet& o) const {
    check_same(o);
    for (size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~o.words_[i]) return false;
    }
    return true;
  }
  bool operator==(const VertexSet& o) const {
    return n_ == o.n_ && words_ == o.words_;
  }

  int intersection_count(const VertexSet& o) const {
    check_same(o);
    int c = 0;
    for (size_t i = 0; i < words_.size(); ++i) c += std::popcount(words_[i] & o.words_[i]);
    return c;
  }

  template <class F>
  void for_each(F f) const {
    for (size_t i = 0; i < words_.size(); ++i) {
      uint64_t w = words_[i];
      while (w) {
        int b = std::countr_zero(w);
        f(static_cast<int>(i * 64 + b));
        w &= w - 1;
      }
    }
  }

  std::vector<int> to_vector() const {
    std::vector<int> out;
    out.reserve(count());
    for_each([&](int v) { out.push_back(v); });
    return out;
  }

  const std::vector<uint64_t>& words() const { return words_; }
  void or_word_block(const std::vector<uint64_t>& ws) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= ws[i];
  }

 private:
  void check_range(int v) const {
    if (v < 0 || v >= n_) throw std::out_of_range("VertexSet: vertex out of range");
  }
  void check_same(const VertexSet& o) const {
    if (n_ != o.n_) throw std::invalid_argument("VertexSet: universe mismatch");
  }

  int n_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace tw
