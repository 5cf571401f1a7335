#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fbrl {

// Seeded random stream. All draws go through our own reductions on top of
// std::mt19937_64 so that identically seeded streams produce identical
// sequences on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream derived from a root seed and a label, e.g.
  // Rng::substream(seed, "agent") or Rng::substream(seed, "imagination/2").
  // Distinct labels give statistically independent streams, so adding a
  // consumer (say, imagination) does not perturb the draws of another.
  static Rng substream(std::uint64_t root_seed, std::string_view label) {
    return Rng(mix(root_seed ^ fnv1a(label)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased uniform integer in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) return 0;
    while (true) {
      std::uint64_t x = engine_();
      unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
      auto low = static_cast<std::uint64_t>(m);
      if (low < n) {
        std::uint64_t threshold = (0 - n) % n;
        if (low < threshold) continue;
      }
      return static_cast<std::uint64_t>(m >> 64);
    }
  }

  int uniform_int(int n) { return static_cast<int>(uniform_below(static_cast<std::uint64_t>(n))); }

  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform_below(static_cast<std::uint64_t>(n)));
  }

  // Uniform in [lo, hi).
  double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  // splitmix64 finalizer; decorrelates nearby seeds.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace fbrl
