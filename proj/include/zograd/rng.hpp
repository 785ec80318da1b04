#pragma once

#include <cstdint>

namespace zograd {

/// Identifies one independent random stream. Draws are a pure function of
/// (key, counter, lane), so any replication can be regenerated on any worker
/// without replaying the others.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  std::uint64_t domain = 0;
};

/// Stream domains used inside the library. Keeping noise and perturbation
/// draws in separate domains means adding perturbations never shifts noise.
namespace domain {
inline constexpr std::uint64_t noise = 0;
inline constexpr std::uint64_t perturbation = 1;
}  // namespace domain

/// 64 random bits for (key, counter, lane).
std::uint64_t counter_bits(const StreamKey& key, std::uint64_t counter, std::uint32_t lane = 0) noexcept;

/// Uniform on the open interval (0, 1), 53-bit resolution.
double uniform_open(const StreamKey& key, std::uint64_t counter, std::uint32_t lane = 0) noexcept;

/// Standard normal via Box-Muller on lanes 0 and 1 of the given counter.
double standard_normal(const StreamKey& key, std::uint64_t counter) noexcept;

/// +1 or -1 with equal probability.
int rademacher(const StreamKey& key, std::uint64_t counter, std::uint32_t lane = 0) noexcept;

}  // namespace zograd
