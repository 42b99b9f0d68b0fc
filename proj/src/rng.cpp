#include "debate_forum/rng.hpp"

#include <limits>
#include <stdexcept>

namespace debate_forum {

std::size_t Rng::uniform_index(std::size_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("uniform_index: bound must be positive");
  }
  const std::uint64_t n = bound;
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) {
    x = engine_();
  }
  return static_cast<std::size_t>(x % n);
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return mix64(mix64(base) ^ fnv1a64(tag));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) {
  return mix64(derive_seed(base, tag) ^ mix64(index));
}

}  // namespace debate_forum
