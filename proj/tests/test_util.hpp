#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "sectorcert/lti.hpp"
#include "sectorcert/rng.hpp"
#include "sectorcert/signal.hpp"

namespace testutil {

using namespace sectorcert;

inline Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) M(i, j) = scale * rng.normal();
  }
  return M;
}

inline Signal random_signal(Rng& rng, int dim, int horizon, double scale = 1.0) {
  return Signal(random_matrix(rng, dim, horizon + 1, scale));
}

/// Random SISO system with spectral radius drawn in [radius_lo, radius_hi].
inline StateSpace random_schur_siso(Rng& rng, int n_max = 4, double radius_lo = 0.2,
                                    double radius_hi = 0.85) {
  const int n = rng.uniform_int(1, n_max);
  Eigen::MatrixXd A = random_matrix(rng, n, n);
  const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(A, false)
                            .eigenvalues()
                            .cwiseAbs()
                            .maxCoeff();
  const double target = rng.uniform(radius_lo, radius_hi);
  if (radius > 0.0) A *= target / radius;
  return StateSpace(A, random_matrix(rng, n, 1), random_matrix(rng, 1, n),
                    random_matrix(rng, 1, 1, 0.5));
}

/// Peak gain oracle for SISO systems: max |G(e^{i omega})| over a uniform grid.
inline double peak_gain_sweep(const StateSpace& G, int grid = 4096) {
  double peak = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double omega = 2.0 * M_PI * j / grid;
    peak = std::max(peak, std::abs(transfer_eval(G, std::polar(1.0, omega))(0, 0)));
  }
  return peak;
}

inline Eigen::MatrixXd random_symmetric(Rng& rng, int n, double scale = 1.0) {
  Eigen::MatrixXd M = random_matrix(rng, n, n, scale);
  return 0.5 * (M + M.transpose());
}

inline bool close_rel(double a, double b, double rtol) {
  return std::abs(a - b) <= rtol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace testutil
