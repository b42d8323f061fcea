#include "affdim/cone.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

#include "affdim/errors.hpp"
#include "affdim/transfer.hpp"

namespace affdim {

namespace {

constexpr double kPi = std::numbers::pi;

double sampled_image_margin(const Mat2& m, int samples) {
  using C = std::complex<double>;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double theta = 2.0 * kPi * k / samples;
    const C z = 0.5 + 0.5 * std::polar(1.0, theta);
    const C u = 2.0 * phi_value(m, z) - 1.0;
    worst = std::max(worst, std::abs(u));
  }
  return 0.5 * (1.0 - worst);
}

/// Relative size of the largest 2x2 minor of the entry vectors of x and y;
/// zero iff x and y are proportional.
double non_proportionality(const Mat2& x, const Mat2& y) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      worst = std::max(worst, std::abs(x.entry(i) * y.entry(j) - x.entry(j) * y.entry(i)));
    }
  }
  double nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    nx += x.entry(i) * x.entry(i);
    ny += y.entry(i) * y.entry(i);
  }
  return worst / std::sqrt(nx * ny);
}

bool is_scalar(const Mat2& m) {
  const double scale = std::abs(m.a) + std::abs(m.b) + std::abs(m.c) + std::abs(m.d);
  const double tol = 1e-12 * scale;
  return std::abs(m.b) <= tol && std::abs(m.c) <= tol && std::abs(m.a - m.d) <= tol;
}

/// Real eigendirections as unit vectors (zero, one or two of them).
std::vector<Vec2> eigendirections(const Mat2& m) {
  const double tr = m.trace();
  const double disc = tr * tr - 4.0 * m.det();
  if (disc < 0.0) return {};
  const double root = std::sqrt(disc);
  std::vector<Vec2> out;
  for (double lambda : {0.5 * (tr + root), 0.5 * (tr - root)}) {
    const Vec2 v1{m.b, lambda - m.a};
    const Vec2 v2{lambda - m.d, m.c};
    const double n1 = std::hypot(v1[0], v1[1]);
    const double n2 = std::hypot(v2[0], v2[1]);
    const Vec2& v = n1 >= n2 ? v1 : v2;
    const double n = std::max(n1, n2);
    if (n == 0.0) continue;
    out.push_back({v[0] / n, v[1] / n});
    if (root == 0.0) break;
  }
  return out;
}

bool is_invariant_direction(const Mat2& m, const Vec2& v) {
  const Vec2 w = mat_vec(m, v);
  const double cross = w[0] * v[1] - w[1] * v[0];
  return std::abs(cross) <= 1e-10 * operator_norm(m);
}

double projective_angle(const Vec2& v) {
  double theta = std::atan2(v[1], v[0]);
  if (theta < 0.0) theta += kPi;
  if (theta >= kPi) theta -= kPi;
  return theta;
}

Vec2 direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Angle of the dominant eigenvector, if the dominant eigenvalue is real and
/// strictly dominant. `complex_pair` is set when the eigenvalues are not real.
std::optional<double> dominant_direction(const Mat2& m, bool& complex_pair) {
  const double tr = m.trace();
  const double disc = tr * tr - 4.0 * m.det();
  const double scale = tr * tr + 4.0 * std::abs(m.det());
  if (disc < -1e-14 * scale) {
    complex_pair = true;
    return std::nullopt;
  }
  if (disc <= 1e-14 * scale) return std::nullopt;
  const double root = std::sqrt(disc);
  const double lambda = tr >= 0.0 ? 0.5 * (tr + root) : 0.5 * (tr - root);
  const Vec2 v1{m.b, lambda - m.a};
  const Vec2 v2{lambda - m.d, m.c};
  const Vec2& v = std::hypot(v1[0], v1[1]) >= std::hypot(v2[0], v2[1]) ? v1 : v2;
  if (v[0] == 0.0 && v[1] == 0.0) return std::nullopt;
  return projective_angle(v);
}

constexpr double kPadGrid[] = {0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0};

/// True if every map sends the arc [lo, lo + width] strictly inside itself,
/// with entries of the conjugated maps above margin times their norm.
bool strictly_invariant(const std::vector<Mat2>& maps, double lo, double width, double margin) {
  const Vec2 v1 = direction(lo);
  const Vec2 v2 = direction(lo + width);
  const Mat2 frame{v1[0], v2[0], v1[1], v2[1]};
  const Mat2 basis = frame.inverse();
  for (const Mat2& g : maps) {
    const Mat2 conj = basis * g * frame;
    const double scale = operator_norm(conj);
    if (!(conj.a > margin * scale && conj.b > margin * scale && conj.c > margin * scale &&
          conj.d > margin * scale)) {
      return false;
    }
  }
  return true;
}

/// Enlarges the projective arc [lo, lo + width] until it contains its images
/// under every map. Returns false if the arc reaches every direction.
bool close_arc(const std::vector<Mat2>& maps, double& lo, double& width) {
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + 0.5 * width;
    double new_lo = lo;
    double new_hi = lo + width;
    for (const Mat2& g : maps) {
      for (double t : {lo, lo + width}) {
        const double theta = projective_angle(mat_vec(g, direction(t)));
        double offset = std::fmod(theta - mid, kPi);
        if (offset < -0.5 * kPi) offset += kPi;
        if (offset >= 0.5 * kPi) offset -= kPi;
        new_lo = std::min(new_lo, mid + offset);
        new_hi = std::max(new_hi, mid + offset);
      }
    }
    const bool grew = new_lo < lo - 1e-15 || new_hi > lo + width + 1e-15;
    lo = new_lo;
    width = new_hi - new_lo;
    if (width >= kPi) return false;
    if (!grew) return true;
  }
  return true;
}

/// Positive-quadrant images: hull of column angles and the x-coordinate
/// spread a/(a+c), b/(b+d).
void positive_arc(const std::vector<Mat2>& maps, ConeResult& out) {
  double lo = kPi, hi = 0.0, eps = 0.0;
  for (const Mat2& m : maps) {
    for (const Vec2& col : {Vec2{m.a, m.c}, Vec2{m.b, m.d}}) {
      const double theta = std::atan2(col[1], col[0]);
      lo = std::min(lo, theta);
      hi = std::max(hi, theta);
      const double x = col[0] / (col[0] + col[1]);
      eps = std::max(eps, std::abs(2.0 * x - 1.0));
    }
  }
  if (!out.direction_arc) out.direction_arc = std::make_pair(lo, hi);
  out.epsilon_gamma = eps;
}

}  // namespace

OmegaReport check_omega(const IfsSystem& system, const OmegaOptions& options) {
  OmegaReport report;
  report.cond_i = report.cond_ii = report.cond_iii = true;
  double min_det = std::numeric_limits<double>::infinity();
  double min_image = std::numeric_limits<double>::infinity();
  double min_w = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < system.maps.size(); ++i) {
    const Mat2& m = system.maps[i];
    MapOmegaDetail d;
    d.index = i;
    d.det = m.det();
    d.positive = is_entrywise_positive(m);
    d.cond_i = d.det != 0.0;
    d.w_min = std::min(m.a + m.c, m.b + m.d);
    d.cond_iii = d.w_min > 0.0;
    if (d.positive) {
      const double phi0 = m.b / (m.b + m.d);
      const double phi1 = m.a / (m.a + m.c);
      d.image_margin = std::min(std::min(phi0, phi1), 1.0 - std::max(phi0, phi1));
      d.cond_ii = d.image_margin > 0.0;
    } else if (d.cond_iii) {
      d.image_margin = sampled_image_margin(m, options.boundary_samples);
      d.cond_ii = d.image_margin > options.margin;
    } else {
      d.image_margin = 0.0;
      d.cond_ii = false;
    }
    report.cond_i = report.cond_i && d.cond_i;
    report.cond_ii = report.cond_ii && d.cond_ii;
    report.cond_iii = report.cond_iii && d.cond_iii;
    min_det = std::min(min_det, std::abs(d.det));
    min_image = std::min(min_image, d.image_margin);
    min_w = std::min(min_w, d.w_min);
    report.per_map_detail.push_back(d);
  }
  double best_pair = 0.0;
  for (std::size_t i = 0; i < system.maps.size(); ++i) {
    for (std::size_t j = i + 1; j < system.maps.size(); ++j) {
      best_pair = std::max(best_pair, non_proportionality(system.maps[i], system.maps[j]));
    }
  }
  report.cond_iv = best_pair > 1e-12;
  report.margins = {std::max(min_det, 0.0), report.cond_ii ? min_image : 0.0,
                    report.cond_iii ? min_w : 0.0, report.cond_iv ? best_pair : 0.0};
  if (system.maps.empty()) {
    report.cond_i = report.cond_ii = report.cond_iii = false;
    report.margins = {0.0, 0.0, 0.0, 0.0};
  }
  return report;
}

bool check_irreducible(const IfsSystem& system) {
  auto first = std::find_if(system.maps.begin(), system.maps.end(),
                            [](const Mat2& m) { return !is_scalar(m); });
  if (first == system.maps.end()) return false;
  const std::vector<Vec2> candidates = eigendirections(*first);
  for (const Vec2& v : candidates) {
    const bool shared = std::all_of(system.maps.begin(), system.maps.end(),
                                    [&](const Mat2& m) { return is_invariant_direction(m, v); });
    if (shared) return false;
  }
  return true;
}

const char* to_string(ConeStatus status) {
  switch (status) {
    case ConeStatus::already_positive: return "already_positive";
    case ConeStatus::conjugated: return "conjugated";
    case ConeStatus::failed: return "failed";
    case ConeStatus::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

ConeResult find_invariant_cone(const IfsSystem& system, int max_depth, double margin) {
  ConeResult result;
  if (std::all_of(system.maps.begin(), system.maps.end(), is_entrywise_positive)) {
    result.status = ConeStatus::already_positive;
    positive_arc(system.maps, result);
    return result;
  }

  const std::size_t m = system.maps.size();
  std::vector<double> angles;
  std::vector<Mat2> level{Mat2::identity()};
  std::size_t enumerated = 0;
  for (int depth = 1; depth <= max_depth; ++depth) {
    if (enumerated + level.size() * m > 200'000) {
      result.note = "word budget exhausted at depth " + std::to_string(depth);
      break;
    }
    std::vector<Mat2> next;
    next.reserve(level.size() * m);
    for (const Mat2& prefix : level) {
      for (const Mat2& g : system.maps) {
        next.push_back(prefix * g);
      }
    }
    enumerated += next.size();
    level = std::move(next);
    for (const Mat2& w : level) {
      bool complex_pair = false;
      const auto theta = dominant_direction(w, complex_pair);
      if (complex_pair) {
        result.status = ConeStatus::failed;
        result.note = "a word of length " + std::to_string(depth) + " has no real eigendirection";
        return result;
      }
      if (theta) angles.push_back(*theta);
    }
    if (angles.empty()) continue;

    // Minimal enclosing projective arc: complement of the largest gap.
    std::vector<double> sorted = angles;
    std::sort(sorted.begin(), sorted.end());
    double largest_gap = sorted.front() + kPi - sorted.back();
    double start = sorted.front();
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      const double gap = sorted[k] - sorted[k - 1];
      if (gap > largest_gap) {
        largest_gap = gap;
        start = sorted[k];
      }
    }
    double lo = start;
    double width = kPi - largest_gap;
    if (!close_arc(system.maps, lo, width)) {
      result.status = ConeStatus::failed;
      result.note = "eigendirections span every direction";
      return result;
    }
    // The closed arc is tight, and a map reversing orientation can push a
    // symmetrically padded edge outside, so the two sides are padded
    // independently. The narrowest strictly invariant arc on the grid wins.
    std::optional<std::pair<double, double>> best;
    for (double rel_lo : kPadGrid) {
      for (double rel_hi : kPadGrid) {
        const double plo = lo - rel_lo * width - 1e-7;
        const double pwidth = width * (1.0 + rel_lo + rel_hi) + 2e-7;
        if (pwidth >= kPi) continue;
        if (best && pwidth >= best->second) continue;
        if (strictly_invariant(system.maps, plo, pwidth, margin)) best = std::make_pair(plo, pwidth);
      }
    }
    if (best) {
      const auto [plo, pwidth] = *best;
      const Vec2 v1 = direction(plo);
      const Vec2 v2 = direction(plo + pwidth);
      const Mat2 basis = Mat2{v1[0], v2[0], v1[1], v2[1]}.inverse();
      result.status = ConeStatus::conjugated;
      result.basis = basis;
      auto wrap = [](double t) {
        t = std::fmod(t, kPi);
        return t < 0.0 ? t + kPi : t;
      };
      result.direction_arc = std::make_pair(wrap(plo), wrap(plo + pwidth));
      positive_arc(conjugate_system(system, basis).maps, result);
      return result;
    }
  }
  result.status = angles.empty() ? ConeStatus::failed : ConeStatus::indeterminate;
  if (result.note.empty()) {
    result.note = angles.empty() ? "no generator word has a dominant eigendirection"
                                 : "no strictly invariant arc found within the depth limit";
  }
  return result;
}

ContractionCertificate estimate_jsr_upper(const IfsSystem& system, int n_max) {
  if (n_max < 1) throw std::invalid_argument("estimate_jsr_upper: n_max must be >= 1");
  ContractionCertificate cert;
  cert.bound = std::numeric_limits<double>::infinity();
  const std::size_t m = system.maps.size();
  std::size_t total = 0;
  std::size_t count = 1;
  for (int n = 1; n <= n_max; ++n) {
    if (count > kMaxEnumeratedWords / m || total + count * m > kMaxEnumeratedWords) break;
    count *= m;
    total += count;
    double worst = 0.0;
    // Depth-first enumeration with prefix reuse.
    std::vector<Mat2> stack(static_cast<std::size_t>(n) + 1);
    std::vector<std::size_t> choice(static_cast<std::size_t>(n), 0);
    stack[0] = Mat2::identity();
    int depth = 0;
    while (depth >= 0) {
      if (depth == n) {
        worst = std::max(worst, operator_norm(stack[n]));
        --depth;
        continue;
      }
      std::size_t& c = choice[depth];
      if (c == m) {
        c = 0;
        --depth;
        continue;
      }
      stack[depth + 1] = stack[depth] * system.maps[c];
      ++c;
      ++depth;
    }
    const double bound = std::pow(worst, 1.0 / n);
    cert.bounds.push_back(bound);
    if (bound < cert.bound) {
      cert.bound = bound;
      cert.word_length = n;
    }
    if (bound < 1.0) {
      cert.certified = true;
      cert.bound = bound;
      cert.word_length = n;
      return cert;
    }
  }
  return cert;
}

GammaHull gamma_hull(const IfsSystem& system, int depth) {
  for (std::size_t i = 0; i < system.maps.size(); ++i) {
    const Mat2& m = system.maps[i];
    if (!(m.a + m.c > 0.0 && m.b + m.d > 0.0)) {
      throw ValidationError("gamma_hull: w_A not positive on [0,1] for map " + std::to_string(i), i);
    }
    const double phi0 = m.b / (m.b + m.d);
    const double phi1 = m.a / (m.a + m.c);
    if (phi0 < 0.0 || phi0 > 1.0 || phi1 < 0.0 || phi1 > 1.0) {
      throw ValidationError("gamma_hull: phi_A does not map [0,1] into itself for map " +
                                std::to_string(i),
                            i);
    }
  }
  GammaHull hull;
  for (int level = 0; level < depth; ++level) {
    double lo = 1.0, hi = 0.0;
    for (const Mat2& m : system.maps) {
      const double x = phi_value(m, hull.lo);
      const double y = phi_value(m, hull.hi);
      lo = std::min({lo, x, y});
      hi = std::max({hi, x, y});
    }
    // Round-off must not break nesting.
    hull.lo = std::max(lo, hull.lo);
    hull.hi = std::min(hi, hull.hi);
  }
  hull.epsilon = std::max(std::abs(2.0 * hull.lo - 1.0), std::abs(2.0 * hull.hi - 1.0));
  return hull;
}

}  // namespace affdim
