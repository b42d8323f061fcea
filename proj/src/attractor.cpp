#include "affdim/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "affdim/cone.hpp"
#include "affdim/errors.hpp"

namespace affdim {

double attractor_radius_bound(const IfsSystem& system) {
  if (!system.translations) return std::numeric_limits<double>::infinity();
  double max_alpha = 0.0, max_b = 0.0;
  for (const Mat2& m : system.maps) max_alpha = std::max(max_alpha, operator_norm(m));
  for (const Vec2& b : *system.translations) max_b = std::max(max_b, std::hypot(b[0], b[1]));
  if (!(max_alpha < 1.0)) return std::numeric_limits<double>::infinity();
  return max_b / (1.0 - max_alpha);
}

AttractorCloud emit_attractor(const IfsSystem& system, std::size_t count, std::uint64_t seed) {
  validate_system(system);
  if (!system.translations) {
    throw ValidationError("attractor: system has no translations");
  }
  if (!estimate_jsr_upper(system).certified) {
    throw ValidationError("attractor: system not certified contracting");
  }
  std::mt19937_64 rng(seed);
  const std::uint64_t m = system.maps.size();
  const auto& translations = *system.translations;
  AttractorCloud cloud;
  cloud.seed = seed;
  cloud.count = count;
  cloud.points.reserve(count);
  Vec2 x{0.0, 0.0};
  for (std::size_t k = 0; k < kAttractorBurnIn + count; ++k) {
    const std::size_t i = static_cast<std::size_t>(rng() % m);
    const Vec2 y = mat_vec(system.maps[i], x);
    x = {y[0] + translations[i][0], y[1] + translations[i][1]};
    if (k >= kAttractorBurnIn) cloud.points.push_back(x);
  }
  return cloud;
}

}  // namespace affdim
