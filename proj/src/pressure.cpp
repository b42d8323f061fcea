#include "affdim/pressure.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <thread>

#include "affdim/cone.hpp"
#include "affdim/errors.hpp"
#include "affdim/spectral.hpp"
#include "affdim/transfer.hpp"

namespace affdim {

namespace {

using Complex = std::complex<double>;

constexpr double kSeam = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_off_seam(double s, const char* who) {
  if (!(s > 0.0 && s < 2.0) || std::abs(s - 1.0) <= kSeam) {
    throw std::domain_error(std::string(who) + ": s must lie in (0,1) u (1,2)");
  }
}

bool boundary_positive(const Mat2& m) {
  if (!(m.a >= 0.0 && m.b >= 0.0 && m.c >= 0.0 && m.d >= 0.0)) return false;
  return m.a + m.c > 0.0 && m.b + m.d > 0.0;
}

std::vector<CMat2> complexify(const std::vector<Mat2>& maps) {
  std::vector<CMat2> out;
  out.reserve(maps.size());
  for (const Mat2& m : maps) out.push_back(to_complex(m));
  return out;
}

/// Real spectral data at the adaptive order; shared by the derivative routes.
SpectralResult<double> real_eigendata(const PreparedSystem& prepared, double s,
                                      const SpectralOptions& options) {
  return adaptive_lambda1(prepared.system, s, options.tol, options.max_order);
}

double complex_lambda_im(std::span<const CMat2> maps, Complex s, std::size_t order) {
  const TruncatedOperator<Complex> op = assemble_operator<Complex>(maps, s, order);
  const SpectralResult<Complex> r = dominant_eig(op.entries, kPowerTolFloor);
  return r.lambda1.imag();
}

/// Perturbed generators of the input system, conjugated by the prepared
/// basis, with the operator hypotheses re-checked in complex arithmetic.
std::vector<CMat2> perturbed_complex_maps(const IfsSystem& system, const PreparedSystem& prepared,
                                          std::size_t entry_index, double h) {
  if (entry_index >= system.parameter_count()) {
    throw std::out_of_range("parameter index " + std::to_string(entry_index) + " out of range");
  }
  std::vector<CMat2> maps = complexify(system.maps);
  maps[entry_index / 4].entry(entry_index % 4) += Complex(0.0, h);
  if (prepared.basis) {
    const CMat2 b = to_complex(*prepared.basis);
    const CMat2 inv = b.inverse();
    for (CMat2& m : maps) m = b * m * inv;
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const MapMargins mm = map_margins(maps[i]);
    const double image_floor = prepared.boundary_degenerate ? -1e-12 : 0.0;
    if (!(mm.det_real > 0.0) || !(mm.w_real_min > 0.0) || !(mm.image_margin > image_floor)) {
      throw ValidationError("perturbed map " + std::to_string(i) +
                                " leaves the operator domain: |Re det| = " +
                                std::to_string(mm.det_real) +
                                ", min Re w = " + std::to_string(mm.w_real_min) +
                                ", image margin = " + std::to_string(mm.image_margin),
                            i);
    }
  }
  return maps;
}

}  // namespace

const char* to_string(PressureMethod method) {
  switch (method) {
    case PressureMethod::spectral: return "spectral";
    case PressureMethod::brute_force: return "brute_force";
    case PressureMethod::closed_form_high_s: return "closed_form_high_s";
  }
  return "spectral";
}

const char* to_string(DerivativeMethod method) {
  switch (method) {
    case DerivativeMethod::perturbation: return "perturbation";
    case DerivativeMethod::complex_step: return "complex-step";
    case DerivativeMethod::central: return "central";
  }
  return "perturbation";
}

PreparedSystem prepare_for_operator(const IfsSystem& system) {
  validate_system(system);
  PreparedSystem out;
  if (system.basis) {
    out.system = conjugate_system(system, *system.basis);
    out.basis = system.basis;
    for (std::size_t i = 0; i < out.system.maps.size(); ++i) {
      if (!is_entrywise_positive(out.system.maps[i])) {
        throw ValidationError("supplied basis does not make map " + std::to_string(i) +
                                  " entrywise positive",
                              i);
      }
    }
  } else if (std::all_of(system.maps.begin(), system.maps.end(), is_entrywise_positive)) {
    out.system = system;
  } else if (std::all_of(system.maps.begin(), system.maps.end(), boundary_positive)) {
    out.system = system;
    out.boundary_degenerate = true;
    out.warnings.push_back(
        "nonnegative generators with zero entries: phi_A(D) touches the boundary of D");
  } else {
    const ConeResult cone = find_invariant_cone(system);
    if (cone.status != ConeStatus::conjugated || !cone.basis) {
      throw ValidationError(std::string("no strictly invariant cone found (status ") +
                            to_string(cone.status) + "): " + cone.note);
    }
    out.system = conjugate_system(system, *cone.basis);
    out.basis = cone.basis;
  }
  out.system.label = system.label;
  const OmegaReport omega = check_omega(out.system);
  if (!omega.cond_iv) {
    out.proportional = true;
    out.warnings.push_back("all generators projectively proportional: condition (iv) fails");
  }
  return out;
}

PressureValue brute_force_pressure(const IfsSystem& system, double s, int word_length) {
  if (word_length < 1) throw std::invalid_argument("brute_force_pressure: n must be >= 1");
  if (!(s >= 0.0)) throw std::domain_error("brute_force_pressure: s must be nonnegative");
  const std::size_t m = system.maps.size();
  if (m == 0) throw ValidationError("system has no maps");
  double words = 1.0;
  for (int k = 0; k < word_length; ++k) words *= static_cast<double>(m);
  if (words > static_cast<double>(kMaxEnumeratedWords)) {
    throw std::length_error("brute_force_pressure: " + std::to_string(m) + "^" +
                            std::to_string(word_length) + " words exceeds the 10^7 cap");
  }
  const auto n = static_cast<std::size_t>(word_length);
  std::vector<double> dets(m);
  for (std::size_t i = 0; i < m; ++i) dets[i] = std::abs(system.maps[i].det());
  std::vector<Mat2> stack(n + 1);
  std::vector<double> det_stack(n + 1);
  std::vector<std::size_t> choice(n, 0);
  stack[0] = Mat2::identity();
  det_stack[0] = 1.0;
  double total = 0.0;
  std::size_t depth = 0;
  while (true) {
    if (depth == n) {
      total += phi_s(operator_norm(stack[n]), det_stack[n], s);
      --depth;
      continue;
    }
    std::size_t& c = choice[depth];
    if (c == m) {
      c = 0;
      if (depth == 0) break;
      --depth;
      continue;
    }
    stack[depth + 1] = stack[depth] * system.maps[c];
    det_stack[depth + 1] = det_stack[depth] * dets[c];
    ++c;
    ++depth;
  }
  PressureValue out;
  out.s = s;
  out.value = std::pow(total, 1.0 / word_length);
  out.method = PressureMethod::brute_force;
  out.word_length = word_length;
  out.error_estimate = kNaN;
  return out;
}

double closed_form_high_s(const IfsSystem& system, double s) {
  double total = 0.0;
  for (const Mat2& m : system.maps) total += std::pow(std::abs(m.det()), 0.5 * s);
  return total;
}

PressureValue spectral_pressure(const PreparedSystem& prepared, double s,
                                const SpectralOptions& options) {
  if (!(s >= 0.0)) throw std::domain_error("spectral_pressure: s must be nonnegative");
  PressureValue out;
  out.s = s;
  out.warnings = prepared.warnings;
  if (s > 2.0) {
    out.value = closed_form_high_s(prepared.system, s);
    out.method = PressureMethod::closed_form_high_s;
    out.error_estimate = 0.0;
    return out;
  }
  out.method = PressureMethod::spectral;
  auto evaluate = [&](Branch branch) {
    SpectralResult<double> r =
        adaptive_lambda1(prepared.system, s, options.tol, options.max_order, branch);
    if (!r.converged) {
      out.warnings.push_back("truncation ladder did not reach tol by order " +
                             std::to_string(r.order_used));
    }
    out.order_used = std::max(out.order_used, r.order_used);
    out.error_estimate = std::max(out.error_estimate, r.truncation_err);
    out.gap = std::max(out.gap, r.gap);
    return r.lambda1;
  };
  if (std::abs(s - 1.0) <= kSeam) {
    out.value = 0.5 * (evaluate(Branch::low) + evaluate(Branch::high));
  } else {
    out.value = evaluate(Branch::automatic);
  }
  if (out.gap >= 1.0 - 1e-9) {
    out.warnings.push_back("spectral gap degenerate (|lambda2| = |lambda1|)");
  }
  if (!(out.value > 0.0) || !std::isfinite(out.value)) {
    throw std::runtime_error("spectral_pressure: non-positive dominant eigenvalue");
  }
  return out;
}

PressureValue spectral_pressure(const IfsSystem& system, double s,
                                const SpectralOptions& options) {
  if (s > 2.0) {
    validate_system(system);
    PressureValue out;
    out.s = s;
    out.value = closed_form_high_s(system, s);
    out.method = PressureMethod::closed_form_high_s;
    return out;
  }
  return spectral_pressure(prepare_for_operator(system), s, options);
}

namespace {

DerivativeResult central_s_prepared(const PreparedSystem& prepared, double s, double h,
                                    const SpectralOptions& options) {
  DerivativeResult out;
  out.method = DerivativeMethod::central;
  if (s - h < 1.0 && s + h > 1.0) {
    out.warnings.push_back("central difference straddles the branch seam at s = 1");
  }
  const PressureValue up = spectral_pressure(prepared, s + h, options);
  const PressureValue down = spectral_pressure(prepared, s - h, options);
  out.value = (up.value - down.value) / (2.0 * h);
  out.order_used = std::max(up.order_used, down.order_used);
  return out;
}

DerivativeResult perturbation_s_prepared(const PreparedSystem& prepared, double s,
                                         const SpectralOptions& options) {
  const SpectralResult<double> r = real_eigendata(prepared, s, options);
  if (r.gap_degenerate()) {
    DerivativeResult out = central_s_prepared(prepared, s, kCentralStep, options);
    out.warnings.push_back("spectral gap degenerate: fell back to central differences");
    return out;
  }
  const DenseMatrix<double> dm = assemble_operator_s_derivative(prepared.system, s, r.order_used);
  const std::vector<double> dmr = dm.apply(r.right_vec);
  DerivativeResult out;
  out.method = DerivativeMethod::perturbation;
  out.order_used = r.order_used;
  out.value = detail::bilinear<double>(r.left_vec, dmr) /
              detail::bilinear<double>(r.left_vec, r.right_vec);
  return out;
}

}  // namespace

DerivativeResult pressure_s_derivative(const IfsSystem& system, double s,
                                       const SpectralOptions& options) {
  require_off_seam(s, "pressure_s_derivative");
  return perturbation_s_prepared(prepare_for_operator(system), s, options);
}

DerivativeResult complex_step_s_derivative(const IfsSystem& system, double s, double h,
                                           const SpectralOptions& options) {
  require_off_seam(s, "complex_step_s_derivative");
  const PreparedSystem prepared = prepare_for_operator(system);
  const SpectralResult<double> r = real_eigendata(prepared, s, options);
  const std::vector<CMat2> maps = complexify(prepared.system.maps);
  DerivativeResult out;
  out.method = DerivativeMethod::complex_step;
  out.order_used = r.order_used;
  out.value = complex_lambda_im(maps, Complex(s, h), r.order_used) / h;
  return out;
}

DerivativeResult central_s_derivative(const IfsSystem& system, double s, double h,
                                      const SpectralOptions& options) {
  return central_s_prepared(prepare_for_operator(system), s, h, options);
}

DerivativeResult complex_step_t_derivative(const IfsSystem& system, double s,
                                           std::size_t entry_index, double h,
                                           const SpectralOptions& options) {
  require_off_seam(s, "complex_step_t_derivative");
  if (!(h >= 1e-30 && h <= 1e-6)) {
    throw std::domain_error("complex_step_t_derivative: h must lie in [1e-30, 1e-6]");
  }
  const PreparedSystem prepared = prepare_for_operator(system);
  const SpectralResult<double> r = real_eigendata(prepared, s, options);
  const std::vector<CMat2> maps = perturbed_complex_maps(system, prepared, entry_index, h);
  DerivativeResult out;
  out.method = DerivativeMethod::complex_step;
  out.order_used = r.order_used;
  out.warnings = prepared.warnings;
  out.value = complex_lambda_im(maps, Complex(s, 0.0), r.order_used) / h;
  return out;
}

DerivativeResult perturbation_t_derivative(const IfsSystem& system, double s,
                                           std::size_t entry_index,
                                           const SpectralOptions& options) {
  require_off_seam(s, "perturbation_t_derivative");
  const PreparedSystem prepared = prepare_for_operator(system);
  const SpectralResult<double> r = real_eigendata(prepared, s, options);
  if (r.gap_degenerate()) {
    DerivativeResult out = central_t_derivative(system, s, entry_index, kCentralStep, options);
    out.warnings.push_back("spectral gap degenerate: fell back to central differences");
    return out;
  }
  const std::vector<CMat2> maps =
      perturbed_complex_maps(system, prepared, entry_index, kComplexStep);
  const TruncatedOperator<Complex> op =
      assemble_operator<Complex>(maps, Complex(s, 0.0), r.order_used);
  const std::size_t n = r.order_used;
  DenseMatrix<double> dm(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dm(i, j) = op.entries(i, j).imag() / kComplexStep;
  const std::vector<double> dmr = dm.apply(r.right_vec);
  DerivativeResult out;
  out.method = DerivativeMethod::perturbation;
  out.order_used = n;
  out.warnings = prepared.warnings;
  out.value = detail::bilinear<double>(r.left_vec, dmr) /
              detail::bilinear<double>(r.left_vec, r.right_vec);
  return out;
}

DerivativeResult central_t_derivative(const IfsSystem& system, double s,
                                      std::size_t entry_index, double h,
                                      const SpectralOptions& options) {
  const double t0 = parameter(system, entry_index);
  const PressureValue up =
      spectral_pressure(with_parameter(system, entry_index, t0 + h), s, options);
  const PressureValue down =
      spectral_pressure(with_parameter(system, entry_index, t0 - h), s, options);
  DerivativeResult out;
  out.method = DerivativeMethod::central;
  out.order_used = std::max(up.order_used, down.order_used);
  out.value = (up.value - down.value) / (2.0 * h);
  return out;
}

DimensionResult affinity_dimension(const IfsSystem& system, const SpectralOptions& options) {
  validate_system(system);
  const ContractionCertificate cert = estimate_jsr_upper(system);
  if (!cert.certified) {
    throw ValidationError("system not certified contracting: best bound " +
                          std::to_string(cert.bound) + " at word length " +
                          std::to_string(cert.word_length));
  }
  DimensionResult out;
  const std::size_t m = system.maps.size();
  if (m == 1) {
    out.s0 = 0.0;
    out.residual = 0.0;
    out.dP_ds = std::log(spectral_radius(system.maps[0]));
    out.branch = "trivial";
    out.warnings.push_back("single map: P(0) = 1, root at s = 0");
    return out;
  }

  const double p2 = closed_form_high_s(system, 2.0);
  if (p2 >= 1.0) {
    // Root in the closed-form regime: sum |det|^(s/2) = 1, decreasing in s.
    double lo = 2.0, hi = 4.0;
    while (closed_form_high_s(system, hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) throw std::runtime_error("affinity_dimension: no root below s = 1e6");
    }
    if (p2 == 1.0) hi = lo = 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (closed_form_high_s(system, mid) > 1.0 ? lo : hi) = mid;
      out.iterations = it + 1;
    }
    out.s0 = 0.5 * (lo + hi);
    out.residual = std::abs(closed_form_high_s(system, out.s0) - 1.0);
    double deriv = 0.0;
    for (const Mat2& a : system.maps) {
      const double det = std::abs(a.det());
      deriv += 0.5 * std::pow(det, 0.5 * out.s0) * std::log(det);
    }
    out.dP_ds = deriv;
    out.branch = "closed_form_high_s";
    out.warnings.push_back("root >= 2 used closed form");
    return out;
  }

  const PreparedSystem prepared = prepare_for_operator(system);
  out.warnings = prepared.warnings;
  const double log_m = std::log(static_cast<double>(m));
  double lo = 0.0, hi = 2.0;
  double s = 2.0 * log_m / (log_m - std::log(p2));
  s = std::clamp(s, 1e-3, 2.0 - 1e-3);
  double value = 0.0;
  bool done = false;
  for (int it = 0; it < 100; ++it) {
    out.iterations = it + 1;
    const PressureValue p = spectral_pressure(prepared, s, options);
    value = p.value;
    out.order_used = std::max(out.order_used, p.order_used);
    if (std::abs(value - 1.0) <= options.tol) {
      done = true;
      break;
    }
    (value > 1.0 ? lo : hi) = s;
    double next = 0.5 * (lo + hi);
    if (std::abs(s - 1.0) > kSeam) {
      const DerivativeResult d = perturbation_s_prepared(prepared, s, options);
      const double slope = d.value / value;
      if (slope < 0.0) {
        const double newton = s - std::log(value) / slope;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) {
      done = true;
      break;
    }
    s = next;
  }
  out.s0 = s;
  out.residual = std::abs(value - 1.0);
  if (!done || out.residual > options.tol) {
    out.warnings.push_back("root finder stopped with residual " + std::to_string(out.residual));
  }
  out.branch = s <= 1.0 ? "low" : "high";
  if (std::abs(s - 1.0) < 1e-6) {
    out.warnings.push_back("root at s=1: analyticity is not guaranteed on the branch seam");
  }
  if (std::abs(s - 1.0) > kSeam) {
    out.dP_ds = perturbation_s_prepared(prepared, s, options).value;
  } else {
    out.dP_ds = central_s_prepared(prepared, s, kCentralStep, options).value;
  }
  if (prepared.proportional) {
    out.warnings.push_back("system reducible: spectral gap degenerate");
  }
  return out;
}

DimensionResult affinity_dimension_brute(const IfsSystem& system, int word_length, double tol) {
  validate_system(system);
  DimensionResult out;
  out.branch = "brute_force";
  auto pressure = [&](double s) { return brute_force_pressure(system, s, word_length).value; };
  if (system.maps.size() == 1) {
    out.s0 = 0.0;
    out.warnings.push_back("single map: P(0) = 1, root at s = 0");
    return out;
  }
  double lo = 0.0, hi = 2.0;
  while (pressure(hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("affinity_dimension_brute: no root below s = 1e6");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (pressure(mid) > 1.0 ? lo : hi) = mid;
    ++out.iterations;
  }
  out.s0 = 0.5 * (lo + hi);
  out.residual = std::abs(pressure(out.s0) - 1.0);
  return out;
}

std::vector<SweepRow> sweep(const IfsSystem& base, std::size_t entry_index, double lo, double hi,
                            int steps, const SpectralOptions& options, unsigned threads) {
  if (steps < 1) throw std::invalid_argument("sweep: steps must be >= 1");
  if (entry_index >= base.parameter_count()) {
    throw std::out_of_range("parameter index " + std::to_string(entry_index) + " out of range");
  }
  if (lo > hi) std::swap(lo, hi);
  const std::size_t count = (lo == hi) ? 1 : static_cast<std::size_t>(steps);
  std::vector<SweepRow> rows(count);
  for (std::size_t k = 0; k < count; ++k) {
    rows[k].param_index = entry_index;
    rows[k].param_value =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  auto work = [&](std::size_t k) {
    SweepRow& row = rows[k];
    try {
      IfsSystem system = with_parameter(base, entry_index, row.param_value);
      const DimensionResult d = affinity_dimension(system, options);
      row.s0 = d.s0;
      row.residual = d.residual;
      row.order_used = d.order_used;
      row.status = "ok";
    } catch (const std::exception& e) {
      row.s0 = kNaN;
      row.residual = kNaN;
      row.status = std::string("error: ") + e.what();
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < count;) work(k);
    });
  }
  for (std::size_t k; (k = next.fetch_add(1)) < count;) work(k);
  for (std::thread& t : pool) t.join();
  return rows;
}

}  // namespace affdim
