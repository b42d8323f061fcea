#include "affdim/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "affdim/cone.hpp"
#include "affdim/errors.hpp"

namespace affdim {

SpectralResult<double> adaptive_lambda1(const IfsSystem& system, double s, double tol,
                                        std::size_t max_order, Branch branch) {
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_lambda1: tol must be positive");
  if (max_order < 8) throw std::invalid_argument("adaptive_lambda1: max_order must be >= 8");
  const double inner_tol = std::max(0.01 * tol, kPowerTolFloor);

  SpectralResult<double> best;
  DenseMatrix<double> best_matrix;
  double previous = 0.0;
  bool have_previous = false;
  bool met = false;
  for (std::size_t order = 8; order <= max_order; order *= 2) {
    TruncatedOperator<double> op = assemble_operator(system, s, order, branch);
    SpectralResult<double> r = dominant_eig(op.entries, inner_tol);
    r.order_used = order;
    best = std::move(r);
    best_matrix = std::move(op.entries);
    if (have_previous) {
      best.truncation_err = std::abs(best.lambda1 - previous);
      if (best.truncation_err < tol) {
        met = true;
        break;
      }
    }
    previous = best.lambda1;
    have_previous = true;
  }
  if (!met) best.converged = false;

  best.gap = spectral_gap_estimate(best_matrix, best);

  double mid = 0.5;
  try {
    mid = gamma_hull(system).midpoint();
  } catch (const ValidationError&) {
  }
  const double h_mid = eigenfunction_value(best.right_vec, mid);
  if (h_mid != 0.0) {
    for (double& x : best.right_vec) x /= h_mid;
    for (double& x : best.left_vec) x *= h_mid;
  }
  return best;
}

}  // namespace affdim
