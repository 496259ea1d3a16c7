#include "sectorcert/certify.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "sectorcert/parallel.hpp"

namespace sectorcert {

const char* to_string(CertMethod m) {
  return m == CertMethod::toeplitz_exact ? "toeplitz_exact" : "frequency_asymptotic";
}

namespace {

/// Largest singular value of a general 2x2 matrix, closed form.
double spectral_norm_2x2(double a, double b, double c, double d) {
  const double f = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::max(f * f - 4.0 * det * det, 0.0);
  return std::sqrt(0.5 * (f + std::sqrt(disc)));
}

void require_square(const StateSpace& G, const char* who) {
  if (G.input_dim() != G.output_dim()) {
    throw DimensionError(std::string(who) + ": G must be square (p = m) for the "
                         "two-channel quadratic forms");
  }
}

QuadSpec n_of_tau(const QuadSpec& M, double tau) {
  return QuadSpec(-1.0 / tau - M.k11(), -M.k12(), -1.0 / tau - M.k22(), Side::g,
                  M.feedback());
}

}  // namespace

GainBound gamma_bound(const QuadSpec& M, const QuadSpec& N) {
  const auto compat = compatibility(M, N);
  if (!compat.ok) {
    throw CompatibilityError("gamma_bound: M + N is not negative definite");
  }
  GainBound gb;
  gb.eta = compat.eta;
  // r = || [N12 M11; N22 M21] ||,  q = || [N22 0; 0 M11] ||.
  gb.r = spectral_norm_2x2(N.k12(), M.k11(), N.k22(), M.k12());
  gb.q = std::max(std::abs(N.k22()), std::abs(M.k11()));
  gb.gamma = (gb.r + std::sqrt(gb.r * gb.r + gb.eta * gb.q)) / gb.eta;
  return gb;
}

std::optional<HardConditionFailure> check_hard_condition(const StateSpace& G, const QuadSpec& N,
                                                         int T_max, const Weight& weight) {
  require_square(G, "check_hard_condition");
  if (T_max < 0) throw HorizonError("check_hard_condition: T_max must be >= 0");
  const int m = G.input_dim();

  const Eigen::MatrixXd Gt_full = toeplitz_matrix(G, T_max, weight);
  for (int T = 0; T <= T_max; ++T) {
    const int sz = m * (T + 1);
    const auto Gt = Gt_full.topLeftCorner(sz, sz);
    Eigen::MatrixXd Q = N.k11() * (Gt.transpose() * Gt) + N.k12() * (Gt + Gt.transpose());
    Q.diagonal().array() += N.k22();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    if (es.info() != Eigen::Success) {
      throw NumericsError("check_hard_condition: eigenvalue iteration failed");
    }
    const double lmin = es.eigenvalues()(0);
    const double lmax = es.eigenvalues()(sz - 1);
    const double tol = 1e-9 * (1.0 + std::max(std::abs(lmin), std::abs(lmax)));
    if (lmin < -tol) {
      // Unscale the minimizing direction and re-evaluate it through the
      // signal path as a guard against lifting bugs.
      const Signal xi = rescale(Signal::from_stacked(es.eigenvectors().col(0), m), weight);
      const Signal y = simulate_lti(G, xi).y;
      const double value = quad_form(y, xi, N.matrix(), SipConfig(T, weight));
      if (std::abs(value - lmin) > 1e-6 * (1.0 + std::abs(lmin))) {
        throw InternalError("check_hard_condition: witness re-evaluation mismatch");
      }
      return HardConditionFailure{T, xi, value};
    }
  }
  return std::nullopt;
}

bool check_frequency_condition(const StateSpace& G, const QuadSpec& N, int grid,
                               const Weight& weight) {
  require_square(G, "check_frequency_condition");
  if (grid < 1) throw ParameterError("check_frequency_condition: grid must be >= 1");
  const StateSpace Gs = rho_scale(G, weight);
  if (!is_schur(Gs)) {
    throw FrequencyDomainError(
        "check_frequency_condition: rho-scaled system is not Schur stable; the "
        "asymptotic check is meaningless");
  }

  const int m = G.input_dim();
  std::vector<double> margin(grid);
  parallel_for(grid, [&](int j) {
    const double omega = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(grid);
    const Eigen::MatrixXcd Gh = transfer_eval(Gs, std::polar(1.0, omega));
    Eigen::MatrixXcd H = N.k11() * (Gh.adjoint() * Gh) + N.k12() * (Gh + Gh.adjoint());
    H.diagonal().array() += N.k22();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success) {
      throw NumericsError("check_frequency_condition: eigenvalue iteration failed");
    }
    const double lmin = es.eigenvalues()(0);
    const double lmax = es.eigenvalues()(m - 1);
    margin[j] = lmin + 1e-9 * (1.0 + std::max(std::abs(lmin), std::abs(lmax)));
  });
  return *std::min_element(margin.begin(), margin.end()) >= 0.0;
}

CertifyResult certify(const StateSpace& G, const QuadSpec& M, int T_max, const Weight& weight,
                      const CertifyOptions& opts) {
  require_square(G, "certify");
  if (M.side() != Side::phi) {
    throw ConventionError("certify: M must be a Phi-side constraint");
  }

  CertifyResult result;
  result.degenerate_M = !indefinite(M);

  const auto passes = [&](double tau) {
    return !check_hard_condition(G, n_of_tau(M, tau), T_max, weight).has_value();
  };

  if (auto top_failure = check_hard_condition(G, n_of_tau(M, opts.tau_hi), T_max, weight)) {
    result.failure = std::move(top_failure);
    return result;
  }

  double tau_star = opts.tau_hi;
  if (passes(opts.tau_lo)) {
    tau_star = opts.tau_lo;
  } else {
    // Pass status is monotone nondecreasing in tau, so bisect on log tau.
    double lo = opts.tau_lo;  // fails
    double hi = opts.tau_hi;  // passes
    for (int step = 0; step < opts.max_steps && hi > lo * (1.0 + opts.bracket_rtol); ++step) {
      const double mid = std::sqrt(lo * hi);
      (passes(mid) ? hi : lo) = mid;
    }
    tau_star = hi;
  }
  result.tau_star = tau_star;

  const double tau_cert = tau_star * (1.0 + 1e-3);
  const QuadSpec N = n_of_tau(M, tau_cert);
  if (auto late_failure = check_hard_condition(G, N, T_max, weight)) {
    // Unreachable unless the pass margin sits inside eigensolver noise.
    result.failure = late_failure;
    return result;
  }
  const GainBound gb = gamma_bound(M, N);
  result.certificate = Certificate{N,      tau_cert, gb.eta, gb.r,
                                   gb.q,   gb.gamma, T_max,  weight,
                                   CertMethod::toeplitz_exact};
  return result;
}

namespace {

/// One evaluation of g(tau) = lambda_max(Q0 + tau Q1) together with the range
/// [mu_lo, mu_hi] of x'Q1x over the top eigenspace (the subgradient interval)
/// and the directions achieving it.
struct SubgradientProbe {
  double lambda_max = 0.0;
  double mu_lo = 0.0;
  double mu_hi = 0.0;
  Eigen::VectorXd x_lo;
  Eigen::VectorXd x_hi;
};

SubgradientProbe probe(const Eigen::MatrixXd& Q0, const Eigen::MatrixXd& Q1, double tau) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q0 + tau * Q1);
  if (es.info() != Eigen::Success) {
    throw NumericsError("slemma_min_tau: eigenvalue iteration failed");
  }
  const auto& evals = es.eigenvalues();
  const int n = static_cast<int>(evals.size());
  const double lmax = evals(n - 1);
  const double cluster = 1e-7 * (1.0 + std::abs(lmax));
  int first = n - 1;
  while (first > 0 && evals(first - 1) >= lmax - cluster) --first;
  const Eigen::MatrixXd V = es.eigenvectors().rightCols(n - first);

  Eigen::MatrixXd R1 = V.transpose() * Q1 * V;
  R1 = 0.5 * (R1 + R1.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esr(R1);
  if (esr.info() != Eigen::Success) {
    throw NumericsError("slemma_min_tau: eigenvalue iteration failed");
  }
  const int d = static_cast<int>(R1.rows());
  SubgradientProbe p;
  p.lambda_max = lmax;
  p.mu_lo = esr.eigenvalues()(0);
  p.mu_hi = esr.eigenvalues()(d - 1);
  p.x_lo = V * esr.eigenvectors().col(0);
  p.x_hi = V * esr.eigenvectors().col(d - 1);
  return p;
}

/// Refines a witness inside the top eigenspace: when the subgradient interval
/// straddles zero, blends the extreme directions so that x'Q1x = 0 and hence
/// x'Q0x = lambda_max.
SLemmaResult finish(double tau, const SubgradientProbe& p) {
  Eigen::VectorXd x;
  if (p.mu_lo >= 0.0) {
    x = p.x_lo;  // every top direction already has x'Q1x >= 0; take the smallest
  } else if (p.mu_hi <= 0.0) {
    x = p.x_hi;  // best effort; no nonnegative direction in the eigenspace
  } else {
    const double t = -p.mu_lo / (p.mu_hi - p.mu_lo);
    // x_lo, x_hi are Q1-orthogonal within the eigenspace, so the cross term
    // vanishes and the blend interpolates x'Q1x to zero exactly.
    x = std::sqrt(1.0 - t) * p.x_lo + std::sqrt(t) * p.x_hi;
  }
  return SLemmaResult{tau, p.lambda_max, x};
}

}  // namespace

SLemmaResult slemma_min_tau(const Eigen::MatrixXd& Q0, const Eigen::MatrixXd& Q1,
                            double tau_max, int max_steps) {
  if (Q0.rows() != Q0.cols() || Q1.rows() != Q1.cols() || Q0.rows() != Q1.rows()) {
    throw MatrixError("slemma_min_tau: Q0, Q1 must be square and of equal size");
  }
  const double scale0 = std::max(1.0, Q0.cwiseAbs().maxCoeff());
  const double scale1 = std::max(1.0, Q1.cwiseAbs().maxCoeff());
  if ((Q0 - Q0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale0 ||
      (Q1 - Q1.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale1) {
    throw MatrixError("slemma_min_tau: Q0, Q1 must be symmetric");
  }
  const Eigen::MatrixXd S0 = 0.5 * (Q0 + Q0.transpose());
  const Eigen::MatrixXd S1 = 0.5 * (Q1 + Q1.transpose());
  const double slack = 1e-9 * scale1;

  const auto straddles = [&](const SubgradientProbe& p) {
    return p.mu_lo <= slack && p.mu_hi >= -slack;
  };

  SubgradientProbe p = probe(S0, S1, 0.0);
  if (straddles(p) || p.mu_lo > slack) return finish(0.0, p);  // minimizer at tau = 0

  SubgradientProbe p_hi = probe(S0, S1, tau_max);
  if (p_hi.mu_hi < -slack) return finish(tau_max, p_hi);  // still decreasing at the cap

  double lo = 0.0;        // g decreasing here
  double hi = tau_max;    // g increasing (or flat) here
  for (int step = 0; step < max_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    p = probe(S0, S1, mid);
    if (straddles(p)) return finish(mid, p);
    if (p.mu_hi < -slack) {
      lo = mid;
    } else {
      hi = mid;
      p_hi = p;
    }
  }
  // Interval collapsed without an exact straddle; hi carries the smaller g.
  return finish(hi, p_hi);
}

std::optional<ViolationWitness> find_violation(const StateSpace& G, const QuadSpec& M,
                                               double gamma, int T, const Weight& weight) {
  require_square(G, "find_violation");
  if (!(gamma > 0.0)) throw ParameterError("find_violation: gamma must be positive");
  if (T < 0) throw HorizonError("find_violation: T must be >= 0");

  const int m = G.input_dim();
  const int ns = (T + 1) * m;
  const Eigen::MatrixXd Gt = toeplitz_matrix(G, T, weight);

  // Free coordinates v = [u1; u2; y2] in rho-scaled stacked form; the loop
  // equations make e1, y1, e2 linear images of v.
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(ns, ns);
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::MatrixXd E1(ns, 3 * ns), U2(ns, 3 * ns), Y2(ns, 3 * ns);
  E1 << I, Z, I;
  U2 << Z, I, Z;
  Y2 << Z, Z, I;
  const Eigen::MatrixXd Y1 = Gt * E1;
  const Eigen::MatrixXd E2 = U2 + Y1;

  Eigen::MatrixXd Q0 = Y1.transpose() * Y1 + Y2.transpose() * Y2;
  Q0.topLeftCorner(2 * ns, 2 * ns).diagonal().array() -= gamma * gamma;
  Eigen::MatrixXd Q1 = M.k11() * (E2.transpose() * E2) +
                       M.k12() * (E2.transpose() * Y2 + Y2.transpose() * E2) +
                       M.k22() * (Y2.transpose() * Y2);

  const double tau_max = 1e8;
  const SLemmaResult sl = slemma_min_tau(Q0, Q1, tau_max);
  const double tol =
      1e-9 * (1.0 + Q0.cwiseAbs().maxCoeff() + Q1.cwiseAbs().maxCoeff());
  if (sl.lambda_star <= tol) return std::nullopt;

  // Reconstruct the unscaled triple and re-verify everything through the
  // signal path.
  const Eigen::VectorXd& v = sl.x_star;
  const Signal u1 = rescale(Signal::from_stacked(v.segment(0, ns), m), weight);
  const Signal u2 = rescale(Signal::from_stacked(v.segment(ns, ns), m), weight);
  const Signal y2 = rescale(Signal::from_stacked(v.segment(2 * ns, ns), m), weight);
  const Signal e1(u1.samples() + y2.samples());
  const Signal y1 = simulate_lti(G, e1).y;
  const Signal e2(u2.samples() + y1.samples());

  const Eigen::VectorXd y1_lifted = Gt * (v.segment(0, ns) + v.segment(2 * ns, ns));
  const Signal y1_check = rescale(Signal::from_stacked(y1_lifted, m), weight);
  const double y1_scale = 1.0 + y1.samples().cwiseAbs().maxCoeff();
  if ((y1.samples() - y1_check.samples()).cwiseAbs().maxCoeff() > 1e-9 * y1_scale) {
    throw InternalError("find_violation: lifted and simulated responses disagree");
  }

  const SipConfig cfg(T, weight);
  const Signal u = stack2(u1, u2);
  const Signal y = stack2(y1, y2);
  const Signal e = stack2(e1, e2);
  const double nu = seminorm(u, cfg);
  const double ny = seminorm(y, cfg);
  const double sigma0 = ny * ny - gamma * gamma * nu * nu;
  const double sigma1 = quad_form(e2, y2, M.matrix(), cfg);

  if (sigma1 < -1e-9 || !(sigma0 > 0.0) || !(ny > gamma * nu)) {
    if (sl.tau_star >= 0.99 * tau_max) {
      // Bracket exhaustion: the S-lemma value stayed positive only because
      // the tau search hit its cap; no certified violation.
      return std::nullopt;
    }
    throw InternalError("find_violation: witness failed verification");
  }

  // Diagonal time-varying gain realization where e2[k] permits it.
  OperatorRealization realization;
  realization.gains.assign(T + 1, Eigen::VectorXd::Zero(m));
  bool realizable = true;
  for (int k = 0; k <= T && realizable; ++k) {
    for (int i = 0; i < m; ++i) {
      const double ev = e2.samples()(i, k);
      const double yv = y2.samples()(i, k);
      if (ev != 0.0) {
        realization.gains[k](i) = yv / ev;
      } else if (yv == 0.0) {
        realization.gains[k](i) = 0.0;
      } else {
        realizable = false;
        break;
      }
    }
  }

  ViolationWitness w{u,  y,  e,  gamma, sigma0, sigma1, sl.tau_star, sl.lambda_star,
                     T,  weight, std::nullopt};
  if (realizable) w.realization = std::move(realization);
  return w;
}

std::optional<double> best_rate(const StateSpace& G, const QuadSpec& M, double rho_lo,
                                double rho_hi, double tol, int T_max) {
  if (!(rho_lo > 0.0) || !(rho_lo < rho_hi) || !(rho_hi <= 1.0)) {
    throw ParameterError("best_rate: need 0 < rho_lo < rho_hi <= 1");
  }
  if (!(tol > 0.0)) throw ParameterError("best_rate: tol must be positive");

  const auto certifiable = [&](double rho) {
    return certify(G, M, T_max, Weight(rho)).feasible();
  };
  if (!certifiable(rho_hi)) return std::nullopt;
  if (certifiable(rho_lo)) return rho_lo;

  double lo = rho_lo;  // not certifiable
  double hi = rho_hi;  // certifiable
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (certifiable(mid) ? hi : lo) = mid;
  }
  return hi;
}

LurePlant gradient_method_lure(double m, double L, double alpha) {
  if (!(0.0 < m) || !(m < L)) throw ParameterError("gradient_method_lure: need 0 < m < L");
  if (!(alpha > 0.0)) throw ParameterError("gradient_method_lure: need alpha > 0");
  Eigen::MatrixXd one(1, 1), gain(1, 1), zero(1, 1);
  one << 1.0;
  gain << -alpha;
  zero << 0.0;
  return LurePlant{StateSpace(one, gain, one, zero), sector_interval_to_M(m, L)};
}

}  // namespace sectorcert
