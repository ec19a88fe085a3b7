#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dffg {

// All sampling code takes an explicit engine so chains never share state.
using Rng = std::mt19937_64;
inline constexpr std::string_view kRngName = "mt19937_64";
inline constexpr std::string_view kSubSeedName = "splitmix64(splitmix64(splitmix64(seed) ^ kind) ^ index)";

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class StreamKind : std::uint64_t {
  kParameters = 1,
  kChain = 2,
  kRealization = 3,
  kTrial = 4,
};

/// Seed for an independent sub-stream. Streams are addressed by (kind, index)
/// so adding chains or realizations never perturbs existing ones.
constexpr std::uint64_t sub_seed(std::uint64_t seed, StreamKind kind, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(kind)) ^ index);
}

inline Rng make_rng(std::uint64_t seed, StreamKind kind, std::uint64_t index) {
  return Rng(sub_seed(seed, kind, index));
}

}  // namespace dffg
