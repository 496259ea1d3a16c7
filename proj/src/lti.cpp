#include "sectorcert/lti.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <utility>

namespace sectorcert {

StateSpace::StateSpace(Eigen::MatrixXd A_, Eigen::MatrixXd B_, Eigen::MatrixXd C_,
                       Eigen::MatrixXd D_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), D(std::move(D_)) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw DimensionError("StateSpace: A must be square");
  if (D.rows() < 1 || D.cols() < 1) throw DimensionError("StateSpace: D must be nonempty");
  // n = 0 static systems carry 0 x m / p x 0 blocks; normalize their shapes.
  if (n == 0) {
    B.resize(0, D.cols());
    C.resize(D.rows(), 0);
  }
  if (B.rows() != n || B.cols() != D.cols()) {
    throw DimensionError("StateSpace: B must be n x m");
  }
  if (C.cols() != n || C.rows() != D.rows()) {
    throw DimensionError("StateSpace: C must be p x n");
  }
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite()) {
    throw MatrixError("StateSpace: entries must be finite");
  }
}

StateSpace StateSpace::static_gain(Eigen::MatrixXd D) {
  const Eigen::Index p = D.rows();
  const Eigen::Index m = D.cols();
  return StateSpace(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, m), Eigen::MatrixXd(p, 0),
                    std::move(D));
}

LtiResponse simulate_lti(const StateSpace& G, const Signal& u, const Eigen::VectorXd& x0) {
  const int n = G.state_dim();
  if (u.dim() != G.input_dim()) {
    throw DimensionError("simulate_lti: input dimension " + std::to_string(u.dim()) +
                         " does not match system input dimension " +
                         std::to_string(G.input_dim()));
  }
  if (x0.size() != n) throw DimensionError("simulate_lti: x0 has wrong dimension");

  const int T = u.horizon();
  Eigen::MatrixXd states(n, T + 2);
  Eigen::MatrixXd y(G.output_dim(), T + 1);
  Eigen::VectorXd x = x0;
  for (int k = 0; k <= T; ++k) {
    states.col(k) = x;
    y.col(k) = G.C * x + G.D * u.samples().col(k);
    x = G.A * x + G.B * u.samples().col(k);
  }
  states.col(T + 1) = x;
  return {Signal(std::move(y)), std::move(states)};
}

LtiResponse simulate_lti(const StateSpace& G, const Signal& u) {
  return simulate_lti(G, u, Eigen::VectorXd::Zero(G.state_dim()));
}

std::vector<Eigen::MatrixXd> impulse_response(const StateSpace& G, int T) {
  if (T < 0) throw HorizonError("impulse_response: T must be >= 0");
  std::vector<Eigen::MatrixXd> h;
  h.reserve(T + 1);
  h.push_back(G.D);
  Eigen::MatrixXd P = G.B;  // A^{k-1} B
  for (int k = 1; k <= T; ++k) {
    h.push_back(G.C * P);
    P = G.A * P;
  }
  return h;
}

Eigen::MatrixXd toeplitz_matrix(const StateSpace& G, int T, const Weight& weight) {
  if (T < 0) throw HorizonError("toeplitz_matrix: T must be >= 0");
  const int p = G.output_dim();
  const int m = G.input_dim();
  const auto h = impulse_response(G, T);

  const double step = 1.0 / weight.rho();
  std::vector<Eigen::MatrixXd> hw(h.size());
  double w = 1.0;
  for (int k = 0; k <= T; ++k) {
    if (!std::isfinite(w)) {
      throw NumericsError("toeplitz_matrix: weight rho^{-k} overflows at k = " +
                          std::to_string(k));
    }
    hw[k] = w * h[k];
    w *= step;
  }

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p * (T + 1), m * (T + 1));
  for (int i = 0; i <= T; ++i) {
    for (int j = 0; j <= i; ++j) {
      M.block(i * p, j * m, p, m) = hw[i - j];
    }
  }
  return M;
}

Eigen::MatrixXcd transfer_eval(const StateSpace& G, std::complex<double> z) {
  const int n = G.state_dim();
  if (n == 0) return G.D.cast<std::complex<double>>();
  Eigen::MatrixXcd zIA = -G.A.cast<std::complex<double>>();
  zIA.diagonal().array() += z;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(zIA);
  if (!lu.isInvertible()) {
    throw SingularityError("transfer_eval: zI - A is singular at the requested z");
  }
  return G.C.cast<std::complex<double>>() * lu.solve(G.B.cast<std::complex<double>>()) +
         G.D.cast<std::complex<double>>();
}

StateSpace rho_scale(const StateSpace& G, const Weight& rho) {
  const double r = rho.rho();
  return StateSpace(G.A / r, G.B / r, G.C, G.D);
}

double spectral_radius(const StateSpace& G) {
  if (G.is_static()) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(G.A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericsError("spectral_radius: eigenvalue iteration failed to converge");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_schur(const StateSpace& G) {
  return spectral_radius(G) < 1.0 - 1e-12;
}

}  // namespace sectorcert
