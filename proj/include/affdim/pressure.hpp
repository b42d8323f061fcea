#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "affdim/ifs.hpp"
#include "affdim/mat2.hpp"

namespace affdim {

enum class PressureMethod { spectral, brute_force, closed_form_high_s };
const char* to_string(PressureMethod method);

struct PressureValue {
  double s = 0.0;
  double value = 0.0;
  PressureMethod method = PressureMethod::spectral;
  std::size_t order_used = 0;   // truncation order (spectral)
  int word_length = 0;          // brute force
  double error_estimate = 0.0;  // truncation error, NaN when unknown
  double gap = -1.0;
  std::vector<std::string> warnings;
};

/// A system brought into the form the transfer operator needs: every
/// generator entrywise positive, via the supplied basis or cone discovery.
struct PreparedSystem {
  IfsSystem system;
  std::optional<Mat2> basis;  // B with B A B^-1 positive, if one was used
  bool boundary_degenerate = false;
  bool proportional = false;  // condition (iv) fails
  std::vector<std::string> warnings;
};

/// Throws ValidationError when no positive form is found.
PreparedSystem prepare_for_operator(const IfsSystem& system);

struct SpectralOptions {
  double tol = 1e-12;
  std::size_t max_order = 256;
};

/// (sum over words of length n of phi^s(A_w))^(1/n), depth-first with prefix
/// reuse. Throws std::length_error when |maps|^n exceeds 10^7.
PressureValue brute_force_pressure(const IfsSystem& system, double s, int word_length);

/// sum_i |det A_i|^(s/2), exact for s >= 2.
double closed_form_high_s(const IfsSystem& system, double s);

/// Dominant eigenvalue of the transfer operator for s in [0, 2]; the closed
/// form above for s > 2. Within 1e-9 of s = 1 both branches are evaluated
/// and averaged.
PressureValue spectral_pressure(const IfsSystem& system, double s,
                                const SpectralOptions& options = {});
PressureValue spectral_pressure(const PreparedSystem& prepared, double s,
                                const SpectralOptions& options = {});

enum class DerivativeMethod { perturbation, complex_step, central };
const char* to_string(DerivativeMethod method);

struct DerivativeResult {
  double value = 0.0;
  DerivativeMethod method = DerivativeMethod::perturbation;
  std::size_t order_used = 0;
  std::vector<std::string> warnings;
};

inline constexpr double kComplexStep = 1e-12;
inline constexpr double kCentralStep = 1e-5;

/// dP/ds = left . M'(s) right / (left . right), with M' the exact
/// s-derivative of the assembled matrix. Falls back to central differences
/// when the spectral gap is degenerate. Requires s in (0,1) u (1,2).
DerivativeResult pressure_s_derivative(const IfsSystem& system, double s,
                                       const SpectralOptions& options = {});

/// Im P(s + i h) / h through the complex pipeline.
DerivativeResult complex_step_s_derivative(const IfsSystem& system, double s,
                                           double h = kComplexStep,
                                           const SpectralOptions& options = {});

DerivativeResult central_s_derivative(const IfsSystem& system, double s, double h = kCentralStep,
                                      const SpectralOptions& options = {});

/// Im P(s, t + i h e_j) / h, with the perturbation applied to parameter j of
/// the input system (before any conjugation to positive form). Refuses with
/// ValidationError when the perturbed generators lose the operator
/// hypotheses. Requires s in (0,1) u (1,2) and h in [1e-30, 1e-6].
DerivativeResult complex_step_t_derivative(const IfsSystem& system, double s,
                                           std::size_t entry_index, double h = kComplexStep,
                                           const SpectralOptions& options = {});

/// First-order perturbation formula with dM/dt_j taken entrywise by a
/// complex step on the assembled matrix.
DerivativeResult perturbation_t_derivative(const IfsSystem& system, double s,
                                           std::size_t entry_index,
                                           const SpectralOptions& options = {});

DerivativeResult central_t_derivative(const IfsSystem& system, double s,
                                      std::size_t entry_index, double h = kCentralStep,
                                      const SpectralOptions& options = {});

struct DimensionResult {
  double s0 = 0.0;
  double residual = 0.0;
  double dP_ds = 0.0;
  std::string branch;  // "trivial", "low", "high", "closed_form_high_s"
  std::size_t order_used = 0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Unique root of P(s) = 1. Requires a contraction certificate.
DimensionResult affinity_dimension(const IfsSystem& system, const SpectralOptions& options = {});

/// Root of the brute-force pressure at a fixed word length, by bisection.
DimensionResult affinity_dimension_brute(const IfsSystem& system, int word_length,
                                         double tol = 1e-13);

struct SweepRow {
  std::size_t param_index = 0;
  double param_value = 0.0;
  double s0 = 0.0;
  double residual = 0.0;
  std::size_t order_used = 0;
  std::string status;  // "ok" or "error: ..."

  bool ok() const { return status == "ok"; }
};

/// affinity_dimension over `steps` evenly spaced values of parameter
/// `entry_index`. Rows are independent and computed on up to `threads`
/// workers (0 = hardware concurrency); failing rows carry an error status.
std::vector<SweepRow> sweep(const IfsSystem& base, std::size_t entry_index, double lo, double hi,
                            int steps, const SpectralOptions& options = {},
                            unsigned threads = 0);

}  // namespace affdim
