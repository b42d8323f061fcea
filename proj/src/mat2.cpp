#include "affdim/mat2.hpp"

#include <cmath>
#include <stdexcept>

namespace affdim {

double operator_norm(const Mat2& m) {
  // Closed form: (|A| + |B|)/2 where A, B are the conformal and
  // anti-conformal parts. No subtraction of nearly equal squares.
  const double p = std::hypot(m.a + m.d, m.b - m.c);
  const double q = std::hypot(m.a - m.d, m.b + m.c);
  return 0.5 * (p + q);
}

SingularPair singular_values(const Mat2& m) {
  const double det = std::abs(m.det());
  if (!(det > 0.0)) {
    throw std::domain_error("singular_values: degenerate (singular) matrix");
  }
  const double alpha1 = operator_norm(m);
  return {alpha1, det / alpha1};
}

double phi_s(double alpha1, double abs_det, double s) {
  if (!(s >= 0.0)) {
    throw std::domain_error("phi_s: s must be nonnegative");
  }
  if (s < 1.0) {
    return std::pow(alpha1, s);
  }
  if (s <= 2.0) {
    return std::pow(alpha1, 2.0 - s) * std::pow(abs_det, s - 1.0);
  }
  return std::pow(abs_det, 0.5 * s);
}

double phi_s(const Mat2& m, double s) {
  if (!(s >= 0.0)) {
    throw std::domain_error("phi_s: s must be nonnegative");
  }
  const SingularPair sv = singular_values(m);
  return phi_s(sv.alpha1, sv.alpha1 * sv.alpha2, s);
}

double spectral_radius(const Mat2& m) {
  const double tr = m.trace();
  const double det = m.det();
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) {
    return std::sqrt(std::abs(det));
  }
  const double root = std::sqrt(disc);
  return 0.5 * (std::abs(tr) + root);
}

bool is_entrywise_positive(const Mat2& m) {
  return m.a > 0.0 && m.b > 0.0 && m.c > 0.0 && m.d > 0.0;
}

}  // namespace affdim
