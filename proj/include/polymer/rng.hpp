#pragma once

#include <cstdint>

namespace polymer {

// SplitMix64 finalizer. Used both as the stateless counter hash behind the
// environment field and as the per-task stream generator.
inline uint64_t mix64(uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) noexcept { return mix64(mix64(a) ^ b); }

inline uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) noexcept {
  return mix64(mix64(mix64(a) ^ b) ^ c);
}

inline double uniform01(uint64_t h) noexcept {
  // strictly inside (0,1)
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Small counter-style stream: splitmix64 sequence seeded through the finalizer.
class Stream {
 public:
  explicit Stream(uint64_t seed) noexcept : state_(mix64(seed, 0x7f4a7c15u)) {}

  uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() noexcept { return uniform01(next()); }

  // unbiased up to 2^-64: multiply-high range reduction
  uint32_t below(uint32_t n) noexcept {
    return static_cast<uint32_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  double normal() noexcept;

 private:
  uint64_t state_;
};

// Seed-stream discipline: every parallel task derives its stream from
// (master seed, task index), so merges are scheduling-independent.
inline Stream task_stream(uint64_t master_seed, uint64_t task_index) noexcept {
  return Stream(mix64(master_seed, 0x5eed5eedu, task_index));
}

}  // namespace polymer
