#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace kgfuse {

// Mixes a base seed with a stream index (splitmix64 finalizer). Used to
// derive per-epoch and per-job seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Seeded random source. The engine output is fixed by the standard; the
// distributions are implemented here so draws are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller (no cached second draw).
  double normal();

  std::string serialize() const;
  void deserialize(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

}  // namespace kgfuse
