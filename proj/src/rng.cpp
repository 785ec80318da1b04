#include "zograd/rng.hpp"

#include <cmath>
#include <numbers>

namespace zograd {

namespace {

// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t counter_bits(const StreamKey& key, std::uint64_t counter, std::uint32_t lane) noexcept {
  std::uint64_t h = mix(key.seed);
  h = mix(h ^ (key.replication * 0xd1b54a32d192ed03ULL));
  h = mix(h ^ (key.domain * 0xaef17502108ef2d9ULL));
  h = mix(h ^ (counter * 0xf1357aea2e62a9c5ULL));
  return mix(h ^ (static_cast<std::uint64_t>(lane) * 0x9fb21c651e98df25ULL));
}

double uniform_open(const StreamKey& key, std::uint64_t counter, std::uint32_t lane) noexcept {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  const auto k = counter_bits(key, counter, lane) >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double standard_normal(const StreamKey& key, std::uint64_t counter) noexcept {
  const double u1 = uniform_open(key, counter, 0);
  const double u2 = uniform_open(key, counter, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int rademacher(const StreamKey& key, std::uint64_t counter, std::uint32_t lane) noexcept {
  return (counter_bits(key, counter, lane) >> 63) != 0 ? 1 : -1;
}

}  // namespace zograd
