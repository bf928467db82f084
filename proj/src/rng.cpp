#include "medrl/rng.hpp"

#include <cmath>
#include <numbers>

namespace medrl {

std::string_view stream_name(Stream s) {
  switch (s) {
    case Stream::EnvNoise: return "env-noise";
    case Stream::Sex: return "sex";
    case Stream::Shuffle: return "shuffle";
    case Stream::EpsilonGreedy: return "epsilon-greedy";
    case Stream::WeightInit: return "weight-init";
    case Stream::Schedule: return "schedule";
    case Stream::Replay: return "replay";
    case Stream::Baseline: return "baseline";
  }
  return "unknown";
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, Stream s, std::uint64_t index) {
  return mix64(mix64(mix64(root) ^ static_cast<std::uint64_t>(s)) + index);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Reject the biased tail of the 64-bit range.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace medrl
