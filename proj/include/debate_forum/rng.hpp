#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace debate_forum {

// Seeded pseudorandom source with platform-independent derived draws.
// The standard distributions are implementation-defined, so bounded
// integers, unit reals and shuffles are computed here directly from the
// raw mt19937_64 stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::size_t uniform_index(std::size_t bound);

  // Uniform real in [0, 1) with 53 bits of resolution.
  double uniform01();

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

// Stable hashing used for seed derivation. Results are identical on every
// platform: FNV-1a over bytes, finalized with the splitmix64 mixer.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index);

}  // namespace debate_forum
