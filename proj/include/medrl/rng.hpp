#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace medrl {

using Rng = std::mt19937_64;

/// Named random substreams. Every stochastic component draws from its own
/// stream so that re-seeding one does not perturb the others.
enum class Stream : std::uint64_t {
  EnvNoise = 1,
  Sex = 2,
  Shuffle = 3,
  EpsilonGreedy = 4,
  WeightInit = 5,
  Schedule = 6,
  Replay = 7,
  Baseline = 8,
};

std::string_view stream_name(Stream s);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives the seed of substream `s`, instance `index`, from a root seed.
std::uint64_t derive_seed(std::uint64_t root, Stream s, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t root, Stream s, std::uint64_t index = 0) {
  return Rng(derive_seed(root, s, index));
}

/// Uniform double in [0, 1) built from the top 53 bits. Unlike
/// std::uniform_real_distribution its output is fixed by the standard engine
/// alone, so logs do not depend on the standard library in use.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection; n > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Standard normal via Box-Muller (one draw per call, the pair's second value
/// is discarded to keep the stream position a function of the call count).
double standard_normal(Rng& rng);

}  // namespace medrl
