#pragma once

#include <array>
#include <cstdint>

namespace sqrs {

/// splitmix64 finalizer; used both as the generator step and for seed mixing.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic seed for (master, stream, sweep point, trial). The chain of
/// finalizers keeps trial streams independent of evaluation order, so results
/// do not depend on how trials are scheduled.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t sweep = 0, std::uint64_t trial = 0) {
  std::uint64_t h = mix64(master ^ 0xA0761D6478BD642FULL);
  h = mix64(h ^ stream);
  h = mix64(h ^ (sweep * 0xE7037ED1A0B428DBULL));
  h = mix64(h ^ (trial * 0x8EBC6AF09C88C6E3ULL));
  return h;
}

/// Seeded counter-based PRNG (splitmix64). Self-contained so that sequences
/// are identical across platforms and standard libraries; std:: distributions
/// are implementation-defined and are deliberately not used anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// True with probability p. Exact at p = 0 and p = 1.
  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). Unbiased via rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Categorical draw over four weights (assumed to sum to 1).
  int categorical4(const std::array<double, 4>& w) {
    double u = uniform();
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return 3;
  }

 private:
  std::uint64_t state_;
};

}  // namespace sqrs
