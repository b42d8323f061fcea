#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <type_traits>

namespace affdim {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

/// Real part for real or complex scalars.
template <class T>
constexpr double real_part(const T& x) {
  if constexpr (is_complex_v<T>) {
    return x.real();
  } else {
    return x;
  }
}

template <class T>
constexpr double imag_part(const T& x) {
  if constexpr (is_complex_v<T>) {
    return x.imag();
  } else {
    return 0.0;
  }
}

/// 2x2 matrix [[a, b], [c, d]] over a real or complex scalar.
template <class T>
struct BasicMat2 {
  T a{}, b{}, c{}, d{};

  static constexpr BasicMat2 identity() { return {T(1), T(0), T(0), T(1)}; }
  static constexpr BasicMat2 diag(T x, T y) { return {x, T(0), T(0), y}; }

  constexpr T det() const { return a * d - b * c; }
  constexpr T trace() const { return a + d; }

  /// Row-major entry access, k in [0, 4).
  constexpr const T& entry(std::size_t k) const {
    return k == 0 ? a : k == 1 ? b : k == 2 ? c : d;
  }
  constexpr T& entry(std::size_t k) {
    return k == 0 ? a : k == 1 ? b : k == 2 ? c : d;
  }

  constexpr BasicMat2 inverse() const {
    const T inv = T(1) / det();
    return {d * inv, -b * inv, -c * inv, a * inv};
  }

  constexpr BasicMat2 transpose() const { return {a, c, b, d}; }

  friend constexpr BasicMat2 operator*(const BasicMat2& x, const BasicMat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend constexpr BasicMat2 operator*(T k, const BasicMat2& x) {
    return {k * x.a, k * x.b, k * x.c, k * x.d};
  }
  friend constexpr BasicMat2 operator+(const BasicMat2& x, const BasicMat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend constexpr bool operator==(const BasicMat2&, const BasicMat2&) = default;
};

using Mat2 = BasicMat2<double>;
using CMat2 = BasicMat2<std::complex<double>>;
using Vec2 = std::array<double, 2>;

template <class T>
BasicMat2<std::complex<double>> to_complex(const BasicMat2<T>& m) {
  return {m.a, m.b, m.c, m.d};
}

inline Vec2 mat_vec(const Mat2& m, const Vec2& v) {
  return {m.a * v[0] + m.b * v[1], m.c * v[0] + m.d * v[1]};
}

/// Singular values, alpha1 >= alpha2 > 0.
struct SingularPair {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

/// Throws std::domain_error for a singular matrix.
SingularPair singular_values(const Mat2& m);

/// Spectral (operator 2-) norm; defined for singular matrices too.
double operator_norm(const Mat2& m);

/// Falconer's singular value function specialised to the plane:
///   ||A||^s                         for s in [0, 1)
///   ||A||^(2-s) |det A|^(s-1)       for s in [1, 2]
///   |det A|^(s/2)                   for s > 2
/// Throws std::domain_error for s < 0 or a singular matrix.
double phi_s(const Mat2& m, double s);

/// Same function from ||A|| and |det A|. Products of many generators should
/// pass the product of the generator determinants: a*d - b*c of a long
/// product loses every significant digit.
double phi_s(double alpha1, double abs_det, double s);

/// Spectral radius of a real 2x2 matrix.
double spectral_radius(const Mat2& m);

bool is_entrywise_positive(const Mat2& m);

}  // namespace affdim
