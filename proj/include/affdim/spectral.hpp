#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "affdim/dense_matrix.hpp"
#include "affdim/ifs.hpp"
#include "affdim/mat2.hpp"
#include "affdim/transfer.hpp"

namespace affdim {

template <class T>
struct SpectralResult {
  T lambda1{};
  std::vector<T> right_vec;  // eigenfunction coefficients h_k
  std::vector<T> left_vec;   // normalised so that left . right = 1
  double gap = -1.0;         // |lambda2| / |lambda1|; negative until estimated
  std::size_t order_used = 0;
  double truncation_err = -1.0;  // |lambda1(N) - lambda1(N/2)|
  int iterations = 0;
  bool converged = false;

  bool gap_degenerate() const { return gap >= 1.0 - 1e-9; }
};

namespace detail {

/// Unconjugated bilinear form; analytic in the entries, which keeps the
/// iteration usable for complex-step differentiation.
template <class T>
T bilinear(std::span<const T> x, std::span<const T> y) {
  T acc(0);
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

template <class T>
bool estimates_agree(T current, T previous, double tol) {
  const double scale = std::abs(current);
  if (std::abs(real_part(current) - real_part(previous)) > tol * scale) return false;
  if constexpr (is_complex_v<T>) {
    const double im_tol = std::max(tol, 1e-13);
    if (std::abs(current.imag() - previous.imag()) > im_tol * std::abs(current.imag())) {
      return false;
    }
  }
  return true;
}

struct PowerOutcome {
  int iterations = 0;
  bool converged = false;
};

/// Residual |y - lambda v| / |v| of one iteration.
template <class T>
double residual_norm(const std::vector<T>& v, const std::vector<T>& y, T lambda) {
  double r = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    r += std::norm(y[i] - lambda * v[i]);
    nv += std::norm(v[i]);
  }
  return nv > 0.0 ? std::sqrt(r / nv) : 0.0;
}

/// Stops once successive Rayleigh estimates agree to tol and the residual is
/// below residual_tol.
template <class T, class Apply>
PowerOutcome power_iterate(Apply&& apply, std::vector<T>& v, T& lambda, double tol,
                           double residual_tol, int max_iter) {
  PowerOutcome out;
  T previous(0);
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<T> y = apply(v);
    const T vv = bilinear<T>(v, v);
    lambda = bilinear<T>(v, y) / vv;
    const T norm = std::sqrt(bilinear<T>(y, y));
    out.iterations = it;
    if (std::abs(norm) == 0.0) {
      lambda = T(0);
      out.converged = true;
      return out;
    }
    const bool small_residual = residual_norm(v, y, lambda) <= residual_tol;
    for (std::size_t i = 0; i < y.size(); ++i) v[i] = y[i] / norm;
    if (it > 1 && small_residual && estimates_agree(lambda, previous, tol)) {
      out.converged = true;
      break;
    }
    previous = lambda;
  }
  // Final Rayleigh estimate from the last normalised iterate.
  const std::vector<T> y = apply(v);
  lambda = bilinear<T>(v, y) / bilinear<T>(v, v);
  return out;
}

}  // namespace detail

/// Dominant eigenpair by power iteration from the all-ones vector with a
/// Rayleigh-quotient estimate. Stops when successive estimates differ by
/// less than tol |lambda| and the residual is below tol ||M||_F. The left vector comes from iterating M^T. The
/// right vector is scaled so its largest entry is 1; gap and truncation_err
/// are left unset.
template <class T>
SpectralResult<T> dominant_eig(const DenseMatrix<T>& m, double tol, int max_iter = 100000) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("dominant_eig: matrix must be square and non-empty");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("dominant_eig: tol must be positive");
  const std::size_t n = m.rows();
  SpectralResult<T> r;
  r.order_used = n;

  double frobenius = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) frobenius += std::norm(m(i, j));
  const double residual_tol = tol * std::sqrt(frobenius);

  std::vector<T> right(n, T(1));
  T lambda(0);
  const auto fwd = detail::power_iterate<T>(
      [&](const std::vector<T>& x) { return m.apply(x); }, right, lambda, tol, residual_tol,
      max_iter);

  std::vector<T> left(n, T(1));
  T lambda_t(0);
  const auto bwd = detail::power_iterate<T>(
      [&](const std::vector<T>& x) { return m.apply_transpose(x); }, left, lambda_t, tol,
      residual_tol, max_iter);

  r.lambda1 = lambda;
  r.iterations = fwd.iterations;
  r.converged = fwd.converged && bwd.converged;

  std::size_t pivot = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(right[i]) > std::abs(right[pivot])) pivot = i;
  }
  const T scale = right[pivot];
  if (std::abs(scale) > 0.0) {
    for (T& x : right) x /= scale;
  }
  const T overlap = detail::bilinear<T>(left, right);
  if (std::abs(overlap) > 0.0) {
    for (T& x : left) x /= overlap;
  }
  r.right_vec = std::move(right);
  r.left_vec = std::move(left);
  return r;
}

/// |lambda2| / |lambda1| after deflating the dominant rank-one part,
/// clamped to [0, 1]. |lambda2| is the largest Ritz value of a two-vector
/// subspace iteration on the deflated matrix, so a complex pair is resolved.
/// Works on the real part of the entries.
template <class T>
double spectral_gap_estimate(const DenseMatrix<T>& m, const SpectralResult<T>& result) {
  const std::size_t n = m.rows();
  const double top = std::abs(result.lambda1);
  if (top == 0.0) return 1.0;
  if (n < 2) return 0.0;
  const double lam = real_part(result.lambda1);
  std::vector<double> r(n), l(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = real_part(result.right_vec[i]);
    l[i] = real_part(result.left_vec[i]);
  }
  double overlap = 0.0;
  for (std::size_t i = 0; i < n; ++i) overlap += l[i] * r[i];
  if (overlap == 0.0) return 1.0;
  for (double& v : l) v /= overlap;

  auto project = [&](std::vector<double>& x) {
    double coef = 0.0;
    for (std::size_t i = 0; i < n; ++i) coef += l[i] * x[i];
    for (std::size_t i = 0; i < n; ++i) x[i] -= coef * r[i];
  };
  auto deflated = [&](const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += real_part(m(i, j)) * x[j];
      y[i] = acc;
    }
    double coef = 0.0;
    for (std::size_t i = 0; i < n; ++i) coef += l[i] * x[i];
    for (std::size_t i = 0; i < n; ++i) y[i] -= lam * coef * r[i];
    project(y);
    return y;
  };
  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
  };
  // Orthonormalises (q0, q1) in place; returns false if q0 vanishes.
  auto orthonormalise = [&](std::vector<double>& q0, std::vector<double>& q1) {
    const double n0 = std::sqrt(dot(q0, q0));
    if (!(n0 > 1e-300)) return false;
    for (double& v : q0) v /= n0;
    for (int pass = 0; pass < 2; ++pass) {
      const double c = dot(q0, q1);
      for (std::size_t i = 0; i < n; ++i) q1[i] -= c * q0[i];
    }
    const double n1 = std::sqrt(dot(q1, q1));
    if (n1 > 1e-300) {
      for (double& v : q1) v /= n1;
    } else {
      std::fill(q1.begin(), q1.end(), 0.0);
    }
    return true;
  };

  std::vector<double> q0(n), q1(n);
  for (std::size_t i = 0; i < n; ++i) {
    q0[i] = 1.0 / static_cast<double>(i + 1) + 0.25 * ((i % 3) == 1 ? -1.0 : 1.0);
    q1[i] = std::cos(1.7 * static_cast<double>(i) + 0.3);
  }
  project(q0);
  project(q1);
  if (!orthonormalise(q0, q1)) return 0.0;

  constexpr int kMaxIter = 20000;
  constexpr int kStable = 3;
  double previous = -1.0;
  double estimate = 0.0;
  int stable = 0;
  for (int it = 0; it < kMaxIter; ++it) {
    std::vector<double> z0 = deflated(q0);
    std::vector<double> z1 = deflated(q1);
    // Ritz values of the projected 2x2 matrix Q^T D Q.
    const double h00 = dot(q0, z0), h01 = dot(q0, z1);
    const double h10 = dot(q1, z0), h11 = dot(q1, z1);
    const double half_tr = 0.5 * (h00 + h11);
    const double det = h00 * h11 - h01 * h10;
    const double disc = half_tr * half_tr - det;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      estimate = std::max(std::abs(half_tr + root), std::abs(half_tr - root));
    } else {
      estimate = std::sqrt(std::max(det, 0.0));
    }
    if (previous >= 0.0 && std::abs(estimate - previous) <= 1e-12 * std::max(estimate, 1e-300)) {
      if (++stable >= kStable) break;
    } else {
      stable = 0;
    }
    previous = estimate;
    q0 = std::move(z0);
    q1 = std::move(z1);
    if (!orthonormalise(q0, q1)) return 0.0;
  }
  return std::clamp(estimate / top, 0.0, 1.0);
}

/// Evaluates h(z) = sum_k h_k (2(z - 1/2))^k from the right vector.
template <class T>
T eigenfunction_value(const std::vector<T>& coeffs, double z) {
  const double x = 2.0 * z - 1.0;
  T acc(0);
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
  return acc;
}

/// Floor applied to power-iteration tolerances; below this the Rayleigh
/// estimate is dominated by rounding.
inline constexpr double kPowerTolFloor = 1e-14;

/// Dominant eigendata of the truncated operator at N = 8, 16, 32, ... up to
/// max_order, returning the first level with |lambda(N) - lambda(N/2)| < tol.
/// The system must already satisfy the operator hypotheses (positive after
/// any conjugation). Right vector normalised to 1 at the gamma-hull
/// midpoint; gap filled in.
SpectralResult<double> adaptive_lambda1(const IfsSystem& system, double s, double tol,
                                        std::size_t max_order = 256,
                                        Branch branch = Branch::automatic);

}  // namespace affdim
