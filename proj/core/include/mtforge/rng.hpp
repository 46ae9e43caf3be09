#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mtforge::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

// Per-record randomness: the global seed mixed with a stage index and a
// record id gives the same value on every run and every shard layout.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stage) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stage + 0x51ED2701ull));
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stage,
                            std::string_view record_id) {
  return splitmix64(derive(seed, stage) ^ fnv1a(record_id));
}

class Engine {
public:
  explicit Engine(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t next() { return gen_(); }

  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold)
        return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 gen_;
};

} // namespace mtforge::rng
