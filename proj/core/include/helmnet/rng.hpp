#pragma once

#include <cstdint>

namespace helmnet {

// splitmix64 finalizer. Used both as the PRNG step and as the stream-derivation
// hash, so every random stream in the project is a pure function of the seeds
// that name it (portable across platforms; std::uniform_* distributions are
// implementation-defined and never used).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d49bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b));
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return hash2(hash2(a, b), c);
}

inline std::uint64_t hash4(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d) {
  return hash2(hash3(a, b, c), d);
}

// Counter-based generator: state advances by one splitmix64 step per draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d49bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n == 0 is a caller bug; returns 0.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    return next_u64() % n;  // model sizes make the modulo bias irrelevant
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// One stateless uniform draw in [0, 1) addressed by a counter tuple.
inline double counter_uniform(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b, std::uint64_t c) {
  return (hash4(seed, a, b, c) >> 11) * 0x1.0p-53;
}

}  // namespace helmnet
