#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "sectorcert/signal.hpp"

namespace sectorcert {

/// Discrete-time causal linear operator as a state-space realization
///   x[k+1] = A x[k] + B u[k],   y[k] = C x[k] + D u[k].
///
/// n = 0 (empty A, B, C) represents a static gain y = D u, so static and
/// dynamic systems share one code path.
class StateSpace {
 public:
  StateSpace(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd D);

  static StateSpace static_gain(Eigen::MatrixXd D);

  [[nodiscard]] int state_dim() const { return static_cast<int>(A.rows()); }
  [[nodiscard]] int input_dim() const { return static_cast<int>(D.cols()); }
  [[nodiscard]] int output_dim() const { return static_cast<int>(D.rows()); }
  [[nodiscard]] bool is_static() const { return state_dim() == 0; }

  Eigen::MatrixXd A, B, C, D;
};

struct LtiResponse {
  Signal y;
  /// State trajectory x[0], ..., x[T+1] (n x (T+2); empty for static systems).
  Eigen::MatrixXd states;
};

/// Runs the recursion for k = 0..u.horizon() from initial state x0.
LtiResponse simulate_lti(const StateSpace& G, const Signal& u, const Eigen::VectorXd& x0);

/// Zero-initial-state response (the operator semantics of G).
LtiResponse simulate_lti(const StateSpace& G, const Signal& u);

/// Markov parameters h[0] = D, h[k] = C A^{k-1} B for 1 <= k <= T.
std::vector<Eigen::MatrixXd> impulse_response(const StateSpace& G, int T);

/// Block lower-triangular lifting of the rho-scaled system on horizon T:
/// block (i, j) = rho^{-(i-j)} h[i-j] for i >= j.  Multiplying a stacked
/// input reproduces simulate_lti of rho_scale(G, rho) with x0 = 0.
Eigen::MatrixXd toeplitz_matrix(const StateSpace& G, int T, const Weight& weight);

/// Frequency response C (zI - A)^{-1} B + D.
Eigen::MatrixXcd transfer_eval(const StateSpace& G, std::complex<double> z);

/// (A/rho, B/rho, C, D): realizes conjugation by the rho^{-k} weighting,
/// rho^{-k} (G u)[k] = (G_rho u_bar)[k] with u_bar[k] = rho^{-k} u[k], x0 = 0.
StateSpace rho_scale(const StateSpace& G, const Weight& rho);

double spectral_radius(const StateSpace& G);

/// True iff spectral radius of A < 1 - 1e-12 (static systems are Schur).
bool is_schur(const StateSpace& G);

}  // namespace sectorcert
