#ifndef DNET_RNG_H_
#define DNET_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace dnet {

// Portable seeded generator.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Every draw here is computed from the raw 64-bit words without
// std::*_distribution, so a given seed yields the same stream on every
// conforming toolchain:
//   uniform()     one word w  -> (w >> 11) * 2^-53
//   below(n)      words w until w < 2^64 - (2^64 mod n); result w mod n
//   categorical() one uniform() u; smallest k with u < p_0 + ... + p_k
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t below(std::uint64_t bound) {
    // 2^64 mod bound, computed without overflow.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t word = engine_();
      if (word >= threshold) return word % bound;
    }
  }

  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return k;
    }
    return probs.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

// Independent sub-stream seed for (seed, stream) via splitmix64 finalization.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace dnet

#endif  // DNET_RNG_H_
