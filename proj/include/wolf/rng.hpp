#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wolf {

// Deterministic random source. Every draw goes through rejection-sampled
// uniform_int, so sequences depend only on the seed and never on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(mix(seed, 0x5bd1e995u)) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform draw from [lo, hi], both ends inclusive.
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    const uint64_t bound =
        static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    const uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const uint64_t r = engine_();
      if (r >= threshold) {
        return lo + static_cast<int>((r - threshold) % bound);
      }
    }
  }

  // Fisher-Yates, driven by uniform_int for seed-stable order.
  template <class T>
  void shuffle(std::vector<T>& values) {
    for (int i = static_cast<int>(values.size()) - 1; i > 0; --i) {
      std::swap(values[static_cast<size_t>(i)],
                values[static_cast<size_t>(uniform_int(0, i))]);
    }
  }

  template <class T>
  const T& pick(const std::vector<T>& values) {
    if (values.empty()) throw std::invalid_argument("pick: empty set");
    return values[static_cast<size_t>(
        uniform_int(0, static_cast<int>(values.size()) - 1))];
  }

  // splitmix64 step; used to derive independent child seeds.
  static uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wolf
