#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dgdtrack {

// 64-bit finalizer from SplitMix64. Used for all seed derivation.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed of Monte-Carlo run `run_index` under `master_seed`:
//   splitmix64(master_seed ^ splitmix64(run_index + 0x9E3779B97F4A7C15)).
std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run_index) noexcept;

// Named substream of a seed ("graph", "stream", ...). The name is hashed
// with 64-bit FNV-1a and mixed in through splitmix64.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) noexcept;

// Deterministic random source. The engine is std::mt19937_64 (fully
// specified by the standard); the uniform and normal transforms are
// implemented here so streams are bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; one variate per call, two engine draws.
  double normal() noexcept;

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dgdtrack
