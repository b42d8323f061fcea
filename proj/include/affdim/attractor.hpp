#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "affdim/ifs.hpp"

namespace affdim {

struct AttractorCloud {
  std::vector<Vec2> points;
  std::uint64_t seed = 0;
  std::size_t count = 0;
};

inline constexpr std::size_t kAttractorBurnIn = 100;

/// max ||b|| / (1 - max alpha1(A)); infinite unless every map is a norm
/// contraction.
double attractor_radius_bound(const IfsSystem& system);

/// Chaos game from the origin: discards kAttractorBurnIn points, then
/// returns `count` points. Generator indices come from std::mt19937_64
/// seeded with `seed`, so clouds are reproducible across platforms.
/// Throws ValidationError without translations or without a contraction
/// certificate.
AttractorCloud emit_attractor(const IfsSystem& system, std::size_t count, std::uint64_t seed);

}  // namespace affdim
