#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "sectorcert/lti.hpp"
#include "sectorcert/sector.hpp"
#include "sectorcert/signal.hpp"

namespace sectorcert {

enum class CertMethod { toeplitz_exact, frequency_asymptotic };

const char* to_string(CertMethod m);

/// Closed-form pieces of the gain bound extracted from a compatible (M, N):
///   eta = -lambda_max(M + N),
///   r   = || [N12 M11; N22 M21] ||_2,
///   q   = || [N22 0; 0 M11] ||_2,
///   gamma = (r + sqrt(r^2 + eta q)) / eta.
struct GainBound {
  double eta = 0.0;
  double r = 0.0;
  double q = 0.0;
  double gamma = 0.0;
};

GainBound gamma_bound(const QuadSpec& M, const QuadSpec& N);

/// Proof object for the finite-horizon certification: N = -(1/tau) I - M,
/// eta = 1/tau, and the gain bound derived from (M, N).
struct Certificate {
  QuadSpec N;
  double tau = 0.0;
  double eta = 0.0;
  double r = 0.0;
  double q = 0.0;
  double gamma = 0.0;
  int horizon = 0;
  Weight weight = {};
  CertMethod method = CertMethod::toeplitz_exact;
};

/// Smallest failing horizon of the cumulative check, with an input that
/// drives the quadratic form negative (re-verified through the signal path).
struct HardConditionFailure {
  int T_fail = 0;
  Signal xi;
  double quad_value = 0.0;
};

/// Checks Q_T = N11 Gt'Gt + N12 (Gt + Gt') + N22 I >= -tol I for every
/// T = 0..T_max, where Gt is the weighted Toeplitz lifting of G.
/// Returns nullopt on pass.  tol = 1e-9 (1 + ||Q_T||).
std::optional<HardConditionFailure> check_hard_condition(const StateSpace& G, const QuadSpec& N,
                                                         int T_max, const Weight& weight);

/// Asymptotic screen: min eig of N11 Gh*Gh + N12 (Gh + Gh*) + N22 I >= -tol
/// on the unit circle, Gh = transfer of the rho-scaled system.  Requires the
/// scaled system to be Schur; never used to issue a Certificate.
bool check_frequency_condition(const StateSpace& G, const QuadSpec& N, int grid,
                               const Weight& weight);

struct CertifyOptions {
  double tau_lo = 1e-8;
  double tau_hi = 1e8;
  double bracket_rtol = 1e-7;  ///< termination factor for the log-tau bracket
  int max_steps = 200;
};

struct CertifyResult {
  std::optional<Certificate> certificate;
  /// Failure of the hard check at tau_hi when infeasible.
  std::optional<HardConditionFailure> failure;
  /// Set when lambda_max(M) <= 0; the certificate is still sound but the
  /// necessity direction is not guaranteed for such M.
  bool degenerate_M = false;
  double tau_star = 0.0;  ///< bracket value before the 1e-3 safety margin

  [[nodiscard]] bool feasible() const { return certificate.has_value(); }
};

/// Bracketed bisection on log tau over the N(tau) = -(1/tau) I - M family:
/// finds the smallest passing tau, then issues the certificate at
/// tau* (1 + 1e-3).  Infeasible iff even tau_hi fails.
CertifyResult certify(const StateSpace& G, const QuadSpec& M, int T_max, const Weight& weight,
                      const CertifyOptions& opts = {});

struct SLemmaResult {
  double tau_star = 0.0;
  double lambda_star = 0.0;
  /// Witness direction: top eigenvector at tau*, refined inside the top
  /// eigenspace so that x'Q1x ~ 0 (hence x'Q0x ~ lambda*) when possible.
  Eigen::VectorXd x_star;
};

/// Minimizes g(tau) = lambda_max(Q0 + tau Q1) over tau in [0, tau_max]
/// (convex in tau), by bisection on the subgradient sign.
/// lambda* <= 0 certifies: exists tau >= 0 with Q0 + tau Q1 <= 0.
SLemmaResult slemma_min_tau(const Eigen::MatrixXd& Q0, const Eigen::MatrixXd& Q1,
                            double tau_max = 1e8, int max_steps = 200);

/// Time-varying diagonal gain realization of a witness nonlinearity:
/// y2[k] = gains[k] .* e2[k] componentwise.
struct OperatorRealization {
  std::vector<Eigen::VectorXd> gains;
};

/// Triple (u, y, e) of stacked two-channel signals violating the gain bound
/// gamma while satisfying the cumulative M-sector at its horizon.
struct ViolationWitness {
  Signal u;
  Signal y;
  Signal e;
  double gamma_target = 0.0;
  double sigma0 = 0.0;  ///< ||y||^2 - gamma^2 ||u||^2 > 0
  double sigma1 = 0.0;  ///< cumulative M-form of (e2, y2), >= -1e-9
  double tau_star = 0.0;
  double lambda_star = 0.0;
  int horizon = 0;
  Weight weight = {};
  /// Present when y2[k] = c[k] e2[k] is solvable componentwise at every step;
  /// otherwise the witness is a relation, not a causal operator.
  std::optional<OperatorRealization> realization;

  [[nodiscard]] bool operator_realizable() const { return realization.has_value(); }
};

/// Necessity direction: parametrizes the loop constraints at horizon T by
/// the free stacked vectors (u1, u2, y2), assembles the quadratic forms
///   sigma0 = ||y||^2 - gamma^2 ||u||^2,   sigma1 = M-form of (e2, y2),
/// and runs the S-lemma search.  Returns a verified witness, or nullopt when
/// the bound is tight (lambda* <= tol).
std::optional<ViolationWitness> find_violation(const StateSpace& G, const QuadSpec& M,
                                               double gamma, int T, const Weight& weight);

/// Bisection for the smallest certifiable decay weight in [rho_lo, rho_hi];
/// nullopt when rho_hi itself is not certifiable.  Certifiability is treated
/// as monotone in rho.
std::optional<double> best_rate(const StateSpace& G, const QuadSpec& M, double rho_lo,
                                double rho_hi, double tol, int T_max);

struct LurePlant {
  StateSpace G;
  QuadSpec M;
};

/// Gradient descent x+ = x - alpha grad f(x) with grad f in the pointwise
/// sector [m, L], as the standard loop: G = (A=1, B=-alpha, C=1, D=0) per
/// coordinate and M the interval-sector form.
LurePlant gradient_method_lure(double m, double L, double alpha);

}  // namespace sectorcert
