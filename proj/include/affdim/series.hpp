#pragma once

// Truncated power series in the scaled coordinate x = 2(z - 1/2) on the disc
// D of radius 1/2 centred at 1/2. The monomials x^k have unit H^2(D) norm, so
// a coefficient vector is the truncation of an element of H^2(D).

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "affdim/mat2.hpp"

namespace affdim {

template <class T>
class PowerSeries {
 public:
  using value_type = T;

  PowerSeries() = default;
  explicit PowerSeries(std::size_t order) : c_(order, T(0)) {}
  explicit PowerSeries(std::vector<T> coeffs) : c_(std::move(coeffs)) {}

  static PowerSeries constant(T value, std::size_t order) {
    PowerSeries f(order);
    if (order > 0) f.c_[0] = value;
    return f;
  }

  /// c0 + c1 x, truncated to `order` terms.
  static PowerSeries affine(T c0, T c1, std::size_t order) {
    PowerSeries f(order);
    if (order > 0) f.c_[0] = c0;
    if (order > 1) f.c_[1] = c1;
    return f;
  }

  std::size_t order() const { return c_.size(); }
  const T& operator[](std::size_t k) const { return c_[k]; }
  T& operator[](std::size_t k) { return c_[k]; }
  std::span<const T> coeffs() const { return c_; }
  const std::vector<T>& vector() const { return c_; }

  PowerSeries& operator+=(const PowerSeries& g) {
    check_order(g);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += g.c_[k];
    return *this;
  }
  PowerSeries& operator-=(const PowerSeries& g) {
    check_order(g);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= g.c_[k];
    return *this;
  }
  PowerSeries& operator*=(T k) {
    for (T& x : c_) x *= k;
    return *this;
  }

  friend PowerSeries operator+(PowerSeries f, const PowerSeries& g) { return f += g; }
  friend PowerSeries operator-(PowerSeries f, const PowerSeries& g) { return f -= g; }
  friend PowerSeries operator*(T k, PowerSeries f) { return f *= k; }

  void check_order(const PowerSeries& g) const {
    if (g.order() != order()) {
      throw std::invalid_argument("power series order mismatch: " + std::to_string(order()) +
                                  " vs " + std::to_string(g.order()));
    }
  }

 private:
  std::vector<T> c_;
};

/// Embeds a real series in the complex field.
inline PowerSeries<std::complex<double>> to_complex(const PowerSeries<double>& f) {
  std::vector<std::complex<double>> c(f.coeffs().begin(), f.coeffs().end());
  return PowerSeries<std::complex<double>>(std::move(c));
}

/// Cauchy product truncated to the common order.
template <class T>
PowerSeries<T> series_mul(const PowerSeries<T>& f, const PowerSeries<T>& g) {
  f.check_order(g);
  const std::size_t n = f.order();
  PowerSeries<T> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i] == T(0)) continue;
    for (std::size_t j = 0; i + j < n; ++j) {
      h[i + j] += f[i] * g[j];
    }
  }
  return h;
}

/// Principal logarithm. Requires Re f(0) > 0.
/// Uses g' = f'/f, solving f q = f' for q term by term.
template <class T>
PowerSeries<T> series_log(const PowerSeries<T>& f) {
  const std::size_t n = f.order();
  if (n == 0) return f;
  if (!(real_part(f[0]) > 0.0)) {
    throw std::domain_error("series_log: constant term not in the open right half plane");
  }
  std::vector<T> q(n > 1 ? n - 1 : 0, T(0));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    T acc = T(static_cast<double>(k + 1)) * f[k + 1];
    for (std::size_t j = 1; j <= k; ++j) {
      acc -= f[j] * q[k - j];
    }
    q[k] = acc / f[0];
  }
  PowerSeries<T> g(n);
  g[0] = std::log(f[0]);
  for (std::size_t k = 1; k < n; ++k) {
    g[k] = q[k - 1] / T(static_cast<double>(k));
  }
  return g;
}

/// Exponential via (exp f)' = f' exp f.
template <class T>
PowerSeries<T> series_exp(const PowerSeries<T>& f) {
  const std::size_t n = f.order();
  if (n == 0) return f;
  PowerSeries<T> g(n);
  g[0] = std::exp(f[0]);
  if (!std::isfinite(std::abs(g[0]))) {
    throw std::range_error("series_exp: constant term overflows");
  }
  for (std::size_t k = 1; k < n; ++k) {
    T acc(0);
    for (std::size_t j = 1; j <= k; ++j) {
      acc += T(static_cast<double>(j)) * f[j] * g[k - j];
    }
    g[k] = acc / T(static_cast<double>(k));
  }
  return g;
}

/// f^e = exp(e log f) with the principal branch. Requires Re f(0) > 0.
template <class T>
PowerSeries<T> series_pow(const PowerSeries<T>& f, T e) {
  PowerSeries<T> g = series_log(f);
  g *= e;
  return series_exp(g);
}

/// Horner evaluation at a point of the open unit disc (in x).
template <class T>
T series_eval(const PowerSeries<T>& f, T x0) {
  if (!(std::abs(x0) < 1.0)) {
    throw std::domain_error("series_eval: point outside the open unit disc");
  }
  T acc(0);
  for (std::size_t k = f.order(); k-- > 0;) {
    acc = acc * x0 + f[k];
  }
  return acc;
}

}  // namespace affdim
