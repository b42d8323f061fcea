#pragma once

// Checks of the standing hypotheses: the operator conditions (i)-(iv) on the
// generators, irreducibility, a strictly invariant cone (and the basis that
// makes every generator entrywise positive), and contraction in some norm.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "affdim/ifs.hpp"
#include "affdim/mat2.hpp"

namespace affdim {

struct OmegaOptions {
  int boundary_samples = 256;
  double margin = 1e-9;
};

struct MapOmegaDetail {
  std::size_t index = 0;
  bool positive = false;       // entrywise positive, closed-form checks used
  double det = 0.0;
  double w_min = 0.0;          // min of Re w_A on the closed disc
  double image_margin = 0.0;   // distance from phi_A(D) to the boundary of D
  bool cond_i = false;
  bool cond_ii = false;
  bool cond_iii = false;
};

/// Condition (i): det != 0; (ii): phi_A maps the closed disc strictly inside
/// D; (iii): w_A maps the closed disc into the open right half plane; (iv):
/// two generators with distinct Mobius maps. Margins are distances to
/// violation (zero when violated).
struct OmegaReport {
  bool cond_i = false;
  bool cond_ii = false;
  bool cond_iii = false;
  bool cond_iv = false;
  std::array<double, 4> margins{};
  std::vector<MapOmegaDetail> per_map_detail;

  bool all() const { return cond_i && cond_ii && cond_iii && cond_iv; }
};

OmegaReport check_omega(const IfsSystem& system, const OmegaOptions& options = {});

/// True iff no line through the origin is invariant under every generator.
bool check_irreducible(const IfsSystem& system);

enum class ConeStatus { already_positive, conjugated, failed, indeterminate };

const char* to_string(ConeStatus status);

struct ConeResult {
  ConeStatus status = ConeStatus::indeterminate;
  std::optional<Mat2> basis;
  /// Projective arc, counterclockwise from first to second angle, both in
  /// [0, pi). May wrap through pi.
  std::optional<std::pair<double, double>> direction_arc;
  std::optional<double> epsilon_gamma;
  std::string note;
};

/// Cone discovery: hull of the dominant eigendirections of all words up to
/// `max_depth`, enlarged until it holds its own images, padded and tested
/// for strict invariance.
ConeResult find_invariant_cone(const IfsSystem& system, int max_depth = 10,
                               double margin = 1e-9);

struct ContractionCertificate {
  bool certified = false;
  int word_length = 0;
  double bound = 0.0;
  std::vector<double> bounds;  // bound_n for n = 1, 2, ...
};

inline constexpr std::size_t kMaxEnumeratedWords = 10'000'000;

/// bound_n = max over words of length n of ||A_w||^(1/n), n = 1..n_max,
/// stopping at the first n with bound_n < 1. Stops early when the total
/// number of products would exceed kMaxEnumeratedWords.
ContractionCertificate estimate_jsr_upper(const IfsSystem& system, int n_max = 12);

struct GammaHull {
  double lo = 0.0;
  double hi = 1.0;
  double epsilon = 1.0;  // max |2x - 1| over the hull

  bool degenerate() const { return !(epsilon < 1.0); }
  double midpoint() const { return 0.5 * (lo + hi); }
};

/// Interval enclosing the projective attractor, by iterating the interval
/// maps phi_A on [0, 1] `depth` times. Refuses (ValidationError) when some
/// phi_A does not map [0, 1] into itself.
GammaHull gamma_hull(const IfsSystem& system, int depth = 16);

}  // namespace affdim
