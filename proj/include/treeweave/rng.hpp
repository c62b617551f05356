#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tw {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed plus stream id. Identical (seed, stream) pairs reproduce the same
// generator output; child() derives independent substreams for nested work.
struct RngSeed {
  uint64_t seed = 1;
  uint64_t stream = 0;

  RngSeed child(uint64_t i) const {
    return RngSeed{splitmix64(seed ^ splitmix64(stream + 0x51ed2701)), i};
  }
  RngSeed with_stream(uint64_t s) const { return RngSeed{seed, s}; }
};

// Thin wrapper over mt19937_64 with portable helpers: all sampling is done on
// raw 64-bit outputs, never through std distributions, so results are
// bit-stable across standard libraries.
class Rng {
 public:
  explicit Rng(RngSeed s) : gen_(splitmix64(s.seed) ^ splitmix64(splitmix64(s.stream))) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform integer in [0, bound) by rejection.
  uint64_t below(uint64_t bound) {
    if (bound <= 1) return 0;
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  double unit() {  // [0, 1) with 53 random bits
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return unit() < p;
  }

  // Geometric skip count for G(n,p) style generation: number of misses before
  // the next success, for success probability p in (0,1).
  uint64_t geometric_skip(double p) {
    double u = unit();
    while (u <= 0.0) u = unit();
    double g = std::log(u) / std::log1p(-p);
    if (g >= 1e18) return static_cast<uint64_t>(1e18);
    return static_cast<uint64_t>(g);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from [0, n) in random order.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> out;
    out.reserve(k);
    for (int i = 0; i < k && i < n; ++i) {
      int j = i + static_cast<int>(below(static_cast<uint64_t>(n - i)));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tw
