#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.hpp"

#include "affdim/cone.hpp"
#include "affdim/ifs.hpp"
#include "affdim/spectral.hpp"
#include "affdim/transfer.hpp"

using namespace affdim;

namespace {

IfsSystem of(std::vector<Mat2> maps) { return IfsSystem{std::move(maps), std::nullopt, std::nullopt, ""}; }

DenseMatrix<double> from_eigen(const Eigen::MatrixXd& m) {
  DenseMatrix<double> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

Eigen::MatrixXd to_eigen(const DenseMatrix<double>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

// Eigenvalues sorted by decreasing modulus.
std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(ev.begin(), ev.end(), [](auto x, auto y) { return std::abs(x) > std::abs(y); });
  return ev;
}

double residual(const DenseMatrix<double>& m, const SpectralResult<double>& r) {
  const auto mv = m.apply(r.right_vec);
  double acc = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < mv.size(); ++i) {
    acc += std::pow(mv[i] - r.lambda1 * r.right_vec[i], 2);
    nv += r.right_vec[i] * r.right_vec[i];
  }
  return std::sqrt(acc / nv);
}

}  // namespace

TEST_CASE("dominant_eig on small matrices") {
  const double c = 2.0 * std::sqrt(1.0 / 3.0);
  const auto scalar = dominant_eig(c * DenseMatrix<double>::identity(6), 1e-12);
  CHECK(scalar.lambda1 == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(scalar.converged);
  CHECK(scalar.iterations <= 2);

  DenseMatrix<double> d(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const auto r = dominant_eig(d, 1e-13);
  CHECK(r.lambda1 == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(r.right_vec[0] == doctest::Approx(1.0));
  CHECK(std::abs(r.right_vec[1]) < 1e-12);
  CHECK(spectral_gap_estimate(d, r) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

  CHECK(spectral_gap_estimate(c * DenseMatrix<double>::identity(6), scalar) == 1.0);

  CHECK_THROWS_AS(dominant_eig(DenseMatrix<double>(2, 3), 1e-12), std::invalid_argument);
  CHECK_THROWS_AS(dominant_eig(d, 0.0), std::invalid_argument);
}

TEST_CASE("dominant_eig against a dense eigensolver") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd m(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) m(i, j) = u(rng);
    const auto ev = spectrum(m);
    const DenseMatrix<double> dm = from_eigen(m);
    const double tol = 1e-13;
    const auto r = dominant_eig(dm, tol);
    CHECK(std::abs(r.lambda1 - ev[0].real()) <= 1e-10 * std::abs(ev[0]));
    CHECK(residual(dm, r) <= 10 * tol * m.norm());
    CHECK(dominant_eig(dm.transpose(), tol).lambda1 == doctest::Approx(r.lambda1).epsilon(1e-12));
    const double gap = spectral_gap_estimate(dm, r);
    CHECK(gap == doctest::Approx(std::abs(ev[1]) / std::abs(ev[0])).epsilon(1e-4));
    for (double x : r.right_vec) CHECK(x > 0.0);
    double lr = 0.0;
    for (int i = 0; i < 5; ++i) lr += r.left_vec[i] * r.right_vec[i];
    CHECK(lr == doctest::Approx(1.0));
  }
}

TEST_CASE("transfer matrix spectrum against a dense eigensolver") {
  const IfsSystem standard = load_system(oracle::fixture("standard_two_maps.json"));
  for (double s : {0.3, 1.7}) {
    const auto op = assemble_operator(standard, s, 32);
    const auto ev = spectrum(to_eigen(op.entries));
    const auto r = dominant_eig(op.entries, 1e-14);
    CHECK(std::abs(r.lambda1 - ev[0].real()) <= 1e-12 * std::abs(ev[0]));
    CHECK(std::abs(ev[0].imag()) == 0.0);
    const double gap = spectral_gap_estimate(op.entries, r);
    CHECK(gap < 1.0);
    CHECK(gap == doctest::Approx(std::abs(ev[1]) / std::abs(ev[0])).epsilon(1e-3));
  }
}

TEST_CASE("adaptive ladder") {
  const IfsSystem scalar = of({Mat2::diag(1.0 / 3.0, 1.0 / 3.0), Mat2::diag(1.0 / 3.0, 1.0 / 3.0)});
  const double sim = std::log(2.0) / std::log(3.0);
  const auto rs = adaptive_lambda1(scalar, sim, 1e-12);
  CHECK(std::abs(rs.lambda1 - 1.0) <= 1e-14);
  CHECK(rs.order_used <= 16);
  CHECK(rs.gap_degenerate());

  const Mat2 a{0.3, 0.1, 0.1, 0.2};
  const double rho = (0.5 + std::sqrt(0.05)) / 2.0;
  const auto single = adaptive_lambda1(of({a}), 1.5, 1e-12);
  CHECK(std::abs(single.lambda1 - std::sqrt(rho) * std::sqrt(0.05)) <= 1e-10);
  CHECK(single.converged);

  const IfsSystem standard = load_system(oracle::fixture("standard_two_maps.json"));
  // Reference values from an independent dense implementation at N = 64.
  const std::vector<std::pair<double, double>> ref{{0.3, 1.44001132836696},
                                                   {0.7, 0.92992646173147},
                                                   {1.3, 0.37000224151935},
                                                   {1.7, 0.16755783853683}};
  for (const auto& [s, value] : ref) {
    const auto r = adaptive_lambda1(standard, s, 1e-12);
    CHECK(r.lambda1 == doctest::Approx(value).epsilon(1e-12));
    CHECK(r.order_used <= 64);
    CHECK(r.converged);
    CHECK(r.truncation_err >= 0.0);
    CHECK(r.truncation_err < 1e-12);
    CHECK(r.gap < 1.0);
    CHECK(r.gap > 0.0);
  }
}

TEST_CASE("eigenfunction is positive on the gamma hull and normalised at its midpoint") {
  for (const char* name : {"standard_two_maps.json", "symmetric_pair.json"}) {
    const IfsSystem sys = load_system(oracle::fixture(name));
    const GammaHull hull = gamma_hull(sys);
    for (double s : {0.25, 0.9, 1.1, 1.75}) {
      const auto r = adaptive_lambda1(sys, s, 1e-12);
      CHECK(eigenfunction_value(r.right_vec, hull.midpoint()) == doctest::Approx(1.0).epsilon(1e-12));
      for (int j = 0; j < 100; ++j) {
        const double z = hull.lo + (hull.hi - hull.lo) * j / 99.0;
        CHECK(eigenfunction_value(r.right_vec, z) > 0.0);
      }
      // h is an eigenfunction of the pointwise operator on the hull.
      for (double z : {hull.lo, hull.midpoint(), hull.hi}) {
        double lh = 0.0;
        for (const Mat2& m : sys.maps) {
          lh += psi_value(m, s, z) * eigenfunction_value(r.right_vec, oracle::projective(m, z));
        }
        CHECK(lh == doctest::Approx(r.lambda1 * eigenfunction_value(r.right_vec, z)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("doubling errors decay geometrically") {
  const IfsSystem standard = load_system(oracle::fixture("standard_two_maps.json"));
  for (double s : {0.5, 1.5}) {
    std::vector<double> lam;
    for (std::size_t n : {8, 16, 32, 64}) {
      lam.push_back(dominant_eig(assemble_operator(standard, s, n).entries, 1e-15).lambda1);
    }
    const double floor = 1e-14 * lam.back();
    const double e1 = std::abs(lam[1] - lam[0]);
    const double e2 = std::abs(lam[2] - lam[1]);
    const double e3 = std::abs(lam[3] - lam[2]);
    CHECK(e1 < 1e-6);
    CHECK((e2 <= e1 / 4 || e2 <= floor));
    CHECK((e3 <= e2 / 4 || e3 <= floor));
  }
}
