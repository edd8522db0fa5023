#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lmpso {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a. Used for stream naming and prompt keying; not a security hash.
constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Named substream of a root seed. Same (root, name, index) always yields the
/// same engine state, so any single component can be replayed in isolation.
inline Rng make_stream(std::uint64_t root, std::string_view name, std::uint64_t index = 0) {
  const std::uint64_t tag = fnv1a(name);
  std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Uniform index in [0, n). Modulo reduction keeps the draw sequence portable
/// across standard libraries (uniform_int_distribution is implementation-defined).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

/// SplitMix64. The random-insertion heuristic draws its picks from this so that
/// the shipped seed program can replay the exact same sequence in another language.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::size_t index(std::size_t n) noexcept { return static_cast<std::size_t>((*this)() % n); }

 private:
  std::uint64_t state_;
};

}  // namespace lmpso
