#pragma once

// Truncated matrix of the weighted composition operator
//   (L_s f)(z) = sum_A psi_{A,s}(z) f(phi_A(z))
// on H^2(D), D the disc of radius 1/2 centred at 1/2, in the basis
// e_k = x^k with x = 2(z - 1/2). Column k holds the coefficients of
// sum_A psi_{A,s} u_A^k where u_A = 2(phi_A - 1/2).
//
// Scalars may be real or complex; complex entries/exponents feed the
// complex-step derivatives.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "affdim/dense_matrix.hpp"
#include "affdim/errors.hpp"
#include "affdim/ifs.hpp"
#include "affdim/mat2.hpp"
#include "affdim/series.hpp"

namespace affdim {

enum class Branch { automatic, low, high };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::low: return "low";
    case Branch::high: return "high";
    default: return "automatic";
  }
}

/// Affine pieces of phi_A and w_A in the x coordinate (z = 1/2 + x/2):
///   (a-b)z + b            = num0 + num1 x
///   w_A(z) = (a+c-b-d)z + b+d = den0 + den1 x
template <class T>
struct MobiusData {
  T num0{}, num1{}, den0{}, den1{};
};

/// Per-generator distances to violation of the operator hypotheses.
struct MapMargins {
  double det_real = 0.0;      // |Re det A|
  double w_real_min = 0.0;    // min of Re w_A over the closed disc
  double image_margin = 0.0;  // 1 - max |u_A| over the closed disc (x units)
};

namespace detail {

template <class T>
MobiusData<T> mobius_raw(const BasicMat2<T>& m) {
  const T half(0.5);
  return {half * (m.a + m.b), half * (m.a - m.b), half * (m.a + m.b + m.c + m.d),
          half * (m.a + m.c - m.b - m.d)};
}

}  // namespace detail

/// Exact margins. Re w on |x| <= 1 is minimised at Re den0 - |den1|. When
/// the pole of u lies outside the closed disc the image of the disc under
///   u(x) = (p + q x) / (r + m x)
/// is the disc with centre (p conj(r) - q conj(m)) / (|r|^2 - |m|^2) and
/// radius |q r - p m| / (|r|^2 - |m|^2).
template <class T>
MapMargins map_margins(const BasicMat2<T>& mat) {
  using C = std::complex<double>;
  const MobiusData<T> md = detail::mobius_raw(mat);
  MapMargins out;
  out.det_real = std::abs(real_part(mat.det()));
  const C den0 = C(real_part(md.den0), imag_part(md.den0));
  const C den1 = C(real_part(md.den1), imag_part(md.den1));
  const C num0 = C(real_part(md.num0), imag_part(md.num0));
  const C num1 = C(real_part(md.num1), imag_part(md.num1));
  out.w_real_min = den0.real() - std::abs(den1);
  const double gap = std::norm(den0) - std::norm(den1);
  if (!(gap > 0.0)) {
    out.image_margin = -std::numeric_limits<double>::infinity();
    return out;
  }
  const C p = 2.0 * num0 - den0;
  const C q = 2.0 * num1 - den1;
  const C centre = (p * std::conj(den0) - q * std::conj(den1)) / gap;
  const double radius = std::abs(q * den0 - p * den1) / gap;
  out.image_margin = 1.0 - (std::abs(centre) + radius);
  return out;
}

/// Refuses (ValidationError) when w_A is not bounded away from the
/// imaginary axis on the closed disc.
template <class T>
MobiusData<T> mobius_data(const BasicMat2<T>& m) {
  const MobiusData<T> md = detail::mobius_raw(m);
  if (!(real_part(md.den0) - std::abs(md.den1) > 0.0)) {
    throw ValidationError("w_A does not map the disc into the right half plane");
  }
  return md;
}

/// Pointwise w_A(z), phi_A(z), for cocycle checks.
template <class T, class Z>
auto w_value(const BasicMat2<T>& m, Z z) {
  return (m.a + m.c - m.b - m.d) * z + m.b + m.d;
}
template <class T, class Z>
auto phi_value(const BasicMat2<T>& m, Z z) {
  return ((m.a - m.b) * z + m.b) / w_value(m, z);
}

/// Sign-corrected determinant: det if Re det > 0, -det if Re det < 0.
/// For real matrices this is |det|.
template <class T>
T oriented_det(const BasicMat2<T>& m) {
  const T det = m.det();
  const double re = real_part(det);
  if (re == 0.0) {
    throw ValidationError("Re det A = 0");
  }
  return re > 0.0 ? det : -det;
}

template <class T>
bool use_low_branch(T s, Branch branch) {
  if (branch == Branch::low) return true;
  if (branch == Branch::high) return false;
  return real_part(s) <= 1.0;
}

template <class T>
void check_s_range(T s) {
  const double re = real_part(s);
  if (!(re >= 0.0 && re <= 2.0)) {
    throw std::domain_error("transfer operator requires s in [0, 2]");
  }
}

/// Pointwise psi_{A,s}(z).
template <class T, class Z>
Z psi_value(const BasicMat2<T>& m, T s, Z z, Branch branch = Branch::automatic) {
  const Z w = w_value(m, z);
  if (use_low_branch(s, branch)) {
    return std::exp(Z(s) * std::log(w));
  }
  return std::exp(Z(T(2) - s) * std::log(w)) * std::exp(Z(s - T(1)) * std::log(Z(oriented_det(m))));
}

/// u_A(x) = 2(phi_A(z) - 1/2) as an order-N series. Refuses when the image
/// of the disc leaves the closed disc. The boundary case (phi_A(D) = D, e.g.
/// a scalar matrix) is accepted.
template <class T>
PowerSeries<T> phi_series(const BasicMat2<T>& m, std::size_t order) {
  const MobiusData<T> md = mobius_data(m);
  if (map_margins(m).image_margin < -1e-12) {
    throw ValidationError("phi_A does not map the disc into itself");
  }
  const auto num = PowerSeries<T>::affine(md.num0, md.num1, order);
  const auto den = PowerSeries<T>::affine(md.den0, md.den1, order);
  PowerSeries<T> u = series_mul(num, series_pow(den, T(-1)));
  u *= T(2);
  if (order > 0) u[0] -= T(1);
  return u;
}

template <class T>
PowerSeries<T> w_series(const BasicMat2<T>& m, std::size_t order) {
  const MobiusData<T> md = mobius_data(m);
  return PowerSeries<T>::affine(md.den0, md.den1, order);
}

/// psi_{A,s} = w^s (low branch) or w^(2-s) det'^(s-1) (high branch), where
/// det' is the sign-corrected determinant.
template <class T>
PowerSeries<T> weight_series(const BasicMat2<T>& m, T s, std::size_t order,
                             Branch branch = Branch::automatic) {
  check_s_range(s);
  const PowerSeries<T> w = w_series(m, order);
  if (use_low_branch(s, branch)) {
    return series_pow(w, s);
  }
  PowerSeries<T> psi = series_pow(w, T(2) - s);
  psi *= std::exp((s - T(1)) * std::log(oriented_det(m)));
  return psi;
}

/// d psi_{A,s} / ds: log(w) psi (low) or (log det' - log w) psi (high).
template <class T>
PowerSeries<T> weight_s_derivative_series(const BasicMat2<T>& m, T s, std::size_t order,
                                          Branch branch = Branch::automatic) {
  const PowerSeries<T> psi = weight_series(m, s, order, branch);
  PowerSeries<T> log_w = series_log(w_series(m, order));
  if (use_low_branch(s, branch)) {
    return series_mul(log_w, psi);
  }
  PowerSeries<T> factor = PowerSeries<T>::constant(std::log(oriented_det(m)), order) - log_w;
  return series_mul(factor, psi);
}

template <class T>
struct TruncatedOperator {
  DenseMatrix<T> entries;
  std::size_t order = 0;
  T s{};
  Branch branch = Branch::low;
  std::string system_digest;
};

namespace detail {

/// Adds sum_A weight_A * u_A^k into column k of `out`, generators in order.
template <class T, class WeightFn>
void accumulate_columns(std::span<const BasicMat2<T>> maps, std::size_t order, WeightFn&& weight,
                        DenseMatrix<T>& out) {
  for (const BasicMat2<T>& m : maps) {
    const PowerSeries<T> u = phi_series(m, order);
    PowerSeries<T> col = weight(m);
    for (std::size_t k = 0; k < order; ++k) {
      for (std::size_t j = 0; j < order; ++j) out(j, k) += col[j];
      if (k + 1 < order) col = series_mul(col, u);
    }
  }
}

inline std::string digest_of(std::span<const Mat2> maps) {
  return system_digest(std::vector<Mat2>(maps.begin(), maps.end()));
}

template <class T>
std::string digest_of(std::span<const BasicMat2<T>> maps) {
  std::vector<Mat2> re;
  for (const auto& m : maps) {
    re.push_back({real_part(m.a), real_part(m.b), real_part(m.c), real_part(m.d)});
  }
  return system_digest(re) + (is_complex_v<T> ? "c" : "");
}

}  // namespace detail

template <class T>
TruncatedOperator<T> assemble_operator(std::span<const BasicMat2<T>> maps, T s, std::size_t order,
                                       Branch branch = Branch::automatic) {
  check_s_range(s);
  if (order == 0) throw std::invalid_argument("assemble_operator: order must be positive");
  TruncatedOperator<T> op;
  op.entries = DenseMatrix<T>(order, order);
  op.order = order;
  op.s = s;
  op.branch = use_low_branch(s, branch) ? Branch::low : Branch::high;
  op.system_digest = detail::digest_of(maps);
  detail::accumulate_columns<T>(
      maps, order, [&](const BasicMat2<T>& m) { return weight_series(m, s, order, op.branch); },
      op.entries);
  return op;
}

inline TruncatedOperator<double> assemble_operator(const IfsSystem& system, double s,
                                                   std::size_t order,
                                                   Branch branch = Branch::automatic) {
  return assemble_operator<double>(std::span<const Mat2>(system.maps), s, order, branch);
}

/// Entrywise d/ds of the assembled matrix; u_A^k does not depend on s.
template <class T>
DenseMatrix<T> assemble_operator_s_derivative(std::span<const BasicMat2<T>> maps, T s,
                                              std::size_t order,
                                              Branch branch = Branch::automatic) {
  check_s_range(s);
  const Branch chosen = use_low_branch(s, branch) ? Branch::low : Branch::high;
  DenseMatrix<T> out(order, order);
  detail::accumulate_columns<T>(
      maps, order,
      [&](const BasicMat2<T>& m) { return weight_s_derivative_series(m, s, order, chosen); }, out);
  return out;
}

inline DenseMatrix<double> assemble_operator_s_derivative(const IfsSystem& system, double s,
                                                          std::size_t order,
                                                          Branch branch = Branch::automatic) {
  return assemble_operator_s_derivative<double>(std::span<const Mat2>(system.maps), s, order,
                                                branch);
}

}  // namespace affdim
