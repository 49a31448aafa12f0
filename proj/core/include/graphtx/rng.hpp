#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace gtx {

/// Deterministic splitmix64 generator. The standard <random> distributions are
/// implementation-defined, so everything that must replay bit-identically
/// (dataset generation, init, sampling, dropout) goes through this.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() { return (next_u64() >> 11) * (1.0 / 9007199254740992.0); }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    // rejection sampling keeps the draw unbiased
    uint64_t limit = ~uint64_t{0} - ~uint64_t{0} % n;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return next_double() < p; }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct elements of `pool`, order of selection preserved.
  template <typename T>
  std::vector<T> sample_without_replacement(std::vector<T> pool, size_t k) {
    std::vector<T> out;
    out.reserve(k);
    for (size_t i = 0; i < k && !pool.empty(); ++i) {
      size_t j = static_cast<size_t>(below(pool.size()));
      out.push_back(pool[j]);
      pool.erase(pool.begin() + static_cast<long>(j));
    }
    return out;
  }

 private:
  uint64_t state_;
};

/// Derives an independent stream from (seed, label, index) so different parts
/// of a run never share a generator.
uint64_t stream_seed(uint64_t seed, std::string_view label, uint64_t index = 0);

inline Rng make_rng(uint64_t seed, std::string_view label, uint64_t index = 0) {
  return Rng(stream_seed(seed, label, index));
}

}  // namespace gtx
