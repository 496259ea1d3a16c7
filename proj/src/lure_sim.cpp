#include "sectorcert/lure_sim.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace sectorcert {

Nonlinearity Nonlinearity::zero() {
  Nonlinearity phi(Kind::static_map, "zero");
  phi.map_ = [](const Eigen::VectorXd& xi) { return Eigen::VectorXd::Zero(xi.size()).eval(); };
  return phi;
}

Nonlinearity Nonlinearity::static_gain(double c) {
  Nonlinearity phi(Kind::static_map, "gain");
  phi.params_["gain"] = c;
  phi.map_ = [c](const Eigen::VectorXd& xi) { return (c * xi).eval(); };
  return phi;
}

Nonlinearity Nonlinearity::saturation(double level) {
  if (!(level > 0.0)) throw ParameterError("saturation: level must be positive");
  Nonlinearity phi(Kind::static_map, "saturation");
  phi.params_["level"] = level;
  phi.map_ = [level](const Eigen::VectorXd& xi) {
    return xi.cwiseMax(-level).cwiseMin(level).eval();
  };
  return phi;
}

Nonlinearity Nonlinearity::sector_saturation(double a, double b, double level) {
  if (!(a < b)) throw ParameterError("sector_saturation: need a < b");
  if (!(level > 0.0)) throw ParameterError("sector_saturation: level must be positive");
  Nonlinearity phi(Kind::static_map, "sector_saturation");
  phi.params_["a"] = a;
  phi.params_["b"] = b;
  phi.params_["level"] = level;
  phi.map_ = [a, b, level](const Eigen::VectorXd& xi) {
    return (a * xi + (b - a) * xi.cwiseMax(-level).cwiseMin(level)).eval();
  };
  return phi;
}

Nonlinearity Nonlinearity::custom_map(std::string label, MapFn fn) {
  Nonlinearity phi(Kind::static_map, std::move(label));
  phi.map_ = std::move(fn);
  return phi;
}

Nonlinearity Nonlinearity::time_varying(std::vector<double> gains) {
  if (gains.empty()) throw ParameterError("time_varying: gain sequence must be nonempty");
  Nonlinearity phi(Kind::time_varying_gain, "time_varying_gain");
  phi.gains_ = std::move(gains);
  return phi;
}

Nonlinearity Nonlinearity::delayed_gain(double c) {
  Nonlinearity phi(Kind::delay_gain, "delay_gain");
  phi.params_["gain"] = c;
  return phi;
}

Nonlinearity Nonlinearity::pair(Signal e2, Signal y2) {
  if (e2.dim() != y2.dim()) throw DimensionError("pair_relation: channel dimensions differ");
  if (e2.horizon() != y2.horizon()) {
    throw HorizonError("pair_relation: channel horizons differ");
  }
  Nonlinearity phi(Kind::pair_relation, "pair_relation");
  phi.pair_e2_ = std::move(e2);
  phi.pair_y2_ = std::move(y2);
  return phi;
}

const Signal& Nonlinearity::recorded_e2() const {
  if (!pair_e2_) throw KindError("recorded_e2: not a pair_relation");
  return *pair_e2_;
}

const Signal& Nonlinearity::recorded_y2() const {
  if (!pair_y2_) throw KindError("recorded_y2: not a pair_relation");
  return *pair_y2_;
}

Eigen::VectorXd Nonlinearity::apply(int k, const Eigen::VectorXd& xi) const {
  switch (kind_) {
    case Kind::static_map:
      return map_(xi);
    case Kind::time_varying_gain: {
      if (k < 0 || k >= static_cast<int>(gains_.size())) {
        throw HorizonError("time_varying_gain: step " + std::to_string(k) +
                           " outside the recorded gain sequence");
      }
      return gains_[static_cast<std::size_t>(k)] * xi;
    }
    default:
      throw KindError("apply: nonlinearity kind has no pointwise evaluation");
  }
}

namespace {

void check_loop_dims(const StateSpace& G, const Signal& u1, const Signal& u2, int T) {
  if (G.input_dim() != G.output_dim()) {
    throw DimensionError("interconnect: G must be square (p = m)");
  }
  if (u1.dim() != G.input_dim() || u2.dim() != G.input_dim()) {
    throw DimensionError("interconnect: input channel dimension does not match G");
  }
  if (T < 0) throw HorizonError("interconnect: T must be >= 0");
  if (u1.horizon() < T || u2.horizon() < T) {
    throw HorizonError("interconnect: inputs shorter than the simulation horizon");
  }
}

void assert_loop_residuals(const StateSpace& G, const Signal& u1, const Signal& u2,
                           const Signal& e1, const Signal& e2, const Signal& y1,
                           const Signal& y2, int T, const Eigen::VectorXd& x0) {
  const auto relcheck = [](const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs,
                           const char* what) {
    const double scale = 1.0 + lhs.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      throw InternalError(std::string("interconnect: residual of ") + what +
                          " exceeds tolerance");
    }
  };
  const auto cols = [T](const Signal& s) { return s.samples().leftCols(T + 1); };
  relcheck(cols(e1), cols(u1) + cols(y2), "e1 = u1 + y2");
  relcheck(cols(e2), cols(u2) + cols(y1), "e2 = u2 + y1");
  relcheck(cols(y1), simulate_lti(G, e1, x0).y.samples().leftCols(T + 1), "y1 = G e1");
}

}  // namespace

LoopTrajectory interconnect(const StateSpace& G, const Nonlinearity& phi, const Signal& u1,
                            const Signal& u2, int T, const Eigen::VectorXd& x0) {
  check_loop_dims(G, u1, u2, T);
  const int m = G.input_dim();
  const int n = G.state_dim();
  Eigen::VectorXd x = x0.size() == 0 ? Eigen::VectorXd::Zero(n).eval() : x0;
  if (x.size() != n) throw DimensionError("interconnect: x0 has wrong dimension");

  if (phi.kind() == Nonlinearity::Kind::pair_relation) {
    const Signal& e2_rec = phi.recorded_e2();
    const Signal& y2_rec = phi.recorded_y2();
    if (e2_rec.dim() != m || e2_rec.horizon() < T) {
      throw DimensionError("interconnect: recorded pair does not fit the loop");
    }
    // Replay only: y2 is pinned to the recorded output, then e2 must come out
    // equal to the recorded input.  Anything else is refused.
    Eigen::MatrixXd e1s = u1.samples().leftCols(T + 1) + y2_rec.samples().leftCols(T + 1);
    const Signal e1(e1s);
    const auto resp = simulate_lti(G, e1, x);
    const Signal& y1 = resp.y;
    Eigen::MatrixXd e2s = u2.samples().leftCols(T + 1) + y1.samples().leftCols(T + 1);
    const double scale = 1.0 + e2s.cwiseAbs().maxCoeff() +
                         e2_rec.samples().leftCols(T + 1).cwiseAbs().maxCoeff();
    if ((e2s - e2_rec.samples().leftCols(T + 1)).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw InputError(
          "interconnect: inputs do not reproduce the recorded pair; a pair_relation "
          "witness only replays the trajectory it was built from");
    }
    const Signal e2(e2s);
    const Signal y2(y2_rec.samples().leftCols(T + 1).eval());
    assert_loop_residuals(G, u1, u2, e1, e2, y1, y2, T, x);
    return {stack2(e1, e2), stack2(y1, y2), resp.states};
  }

  const Eigen::VectorXd x_initial = x;
  Eigen::MatrixXd e1s(m, T + 1), e2s(m, T + 1), y1s(m, T + 1), y2s(m, T + 1);
  Eigen::MatrixXd states(n, T + 2);
  const bool d_is_zero = G.D.cwiseAbs().maxCoeff() == 0.0;
  const double input_scale =
      1.0 + u1.samples().cwiseAbs().maxCoeff() + u2.samples().cwiseAbs().maxCoeff();

  for (int k = 0; k <= T; ++k) {
    states.col(k) = x;
    const Eigen::VectorXd u1k = u1.samples().col(k);
    const Eigen::VectorXd u2k = u2.samples().col(k);
    Eigen::VectorXd e1k, e2k, y1k, y2k;

    if (phi.strictly_causal()) {
      // y2[k] depends on e2[k-1] only, so the loop opens at Phi.
      const double c = phi.params().at("gain");
      y2k = k == 0 ? Eigen::VectorXd::Zero(m).eval() : (c * e2s.col(k - 1)).eval();
      e1k = u1k + y2k;
      y1k = G.C * x + G.D * e1k;
      e2k = u2k + y1k;
    } else if (d_is_zero) {
      // D = 0: y1[k] is known from the state, so the loop opens at G.
      y1k = G.C * x;
      e2k = u2k + y1k;
      y2k = phi.apply(k, e2k);
      e1k = u1k + y2k;
    } else {
      // Algebraic loop: damped fixed-point iteration on e2[k].
      // Contraction rates near 1 (loop gain just below well-posedness loss)
      // need far more than 100 damped steps to reach 1e-10, so the cap is
      // generous; divergence is caught by the magnitude guard.
      const Eigen::VectorXd base = u2k + G.C * x + G.D * u1k;
      e2k = base;
      bool converged = false;
      for (int it = 0; it < 10000; ++it) {
        const Eigen::VectorXd next = base + G.D * phi.apply(k, e2k);
        // Terminate on the equation residual, not the step size: near the
        // well-posedness boundary the remaining error is far larger than the
        // last damped step.
        if ((next - e2k).cwiseAbs().maxCoeff() <= 1e-11 * (1.0 + e2k.cwiseAbs().maxCoeff())) {
          converged = true;
          break;
        }
        e2k = 0.5 * e2k + 0.5 * next;
        if (!e2k.allFinite() || e2k.cwiseAbs().maxCoeff() > 1e12 * input_scale) break;
      }
      if (!converged) {
        throw WellPosednessError("interconnect: algebraic loop did not converge at step " +
                                 std::to_string(k));
      }
      y2k = phi.apply(k, e2k);
      e1k = u1k + y2k;
      y1k = G.C * x + G.D * e1k;
    }

    e1s.col(k) = e1k;
    e2s.col(k) = e2k;
    y1s.col(k) = y1k;
    y2s.col(k) = y2k;
    x = G.A * x + G.B * e1k;
  }
  states.col(T + 1) = x;

  const Signal e1(e1s), e2(e2s), y1(y1s), y2(y2s);
  assert_loop_residuals(G, u1, u2, e1, e2, y1, y2, T, x_initial);
  return {stack2(e1, e2), stack2(y1, y2), std::move(states)};
}

bool check_pointwise_sector(const Nonlinearity& phi, const QuadSpec& M, int samples,
                            int dim) {
  if (phi.kind() != Nonlinearity::Kind::static_map &&
      phi.kind() != Nonlinearity::Kind::time_varying_gain) {
    throw KindError("check_pointwise_sector: requires a static_map or time_varying_gain");
  }
  const Eigen::Matrix2d K = M.matrix();
  const auto form_ok = [&](const Eigen::VectorXd& xi, const Eigen::VectorXd& out) {
    const double value = K(0, 0) * xi.squaredNorm() + 2.0 * K(0, 1) * xi.dot(out) +
                         K(1, 1) * out.squaredNorm();
    return value >= -1e-9;
  };

  if (phi.kind() == Nonlinearity::Kind::time_varying_gain) {
    // Per-step gains: the form is quadratic in the gain, so a unit probe per
    // step decides it; random probes cover the vector case.
    Eigen::VectorXd unit = Eigen::VectorXd::Ones(1);
    for (std::size_t k = 0; k < phi.gains().size(); ++k) {
      if (!form_ok(unit, phi.apply(static_cast<int>(k), unit))) return false;
    }
    Rng rng(0);
    for (int s = 0; s < samples; ++s) {
      const int k = rng.uniform_int(0, static_cast<int>(phi.gains().size()) - 1);
      Eigen::VectorXd xi(dim);
      for (int i = 0; i < dim; ++i) xi(i) = rng.normal();
      if (!form_ok(xi, phi.apply(k, xi))) return false;
    }
    return true;
  }

  // Deterministic probes: zero and signed axes at several magnitudes.
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  if (!form_ok(zero, phi.apply(0, zero))) return false;
  for (const double scale : {1e-3, 1e-1, 1.0, 10.0}) {
    for (int i = 0; i < dim; ++i) {
      for (const double sign : {1.0, -1.0}) {
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(dim);
        xi(i) = sign * scale;
        if (!form_ok(xi, phi.apply(0, xi))) return false;
      }
    }
  }
  Rng rng(0);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd xi(dim);
    const double scale = std::pow(10.0, rng.uniform(-2.0, 1.0));
    for (int i = 0; i < dim; ++i) xi(i) = scale * rng.normal();
    if (!form_ok(xi, phi.apply(0, xi))) return false;
  }
  return true;
}

double empirical_gain(const StateSpace& G, const Nonlinearity& phi,
                      const std::vector<std::pair<Signal, Signal>>& inputs, int T,
                      const Weight& weight) {
  const SipConfig cfg(T, weight);
  double worst = -1.0;
  for (const auto& [u1, u2] : inputs) {
    const double nu = seminorm(stack2(u1, u2), cfg);
    if (nu == 0.0) continue;
    const auto run = interconnect(G, phi, u1, u2, T);
    worst = std::max(worst, seminorm(run.y, cfg) / nu);
  }
  if (worst < 0.0) throw InputError("empirical_gain: all inputs have zero seminorm");
  return worst;
}

DecayResult verify_exponential_decay(const StateSpace& G, const Nonlinearity& phi,
                                     const Weight& rho,
                                     const std::vector<Eigen::VectorXd>& x0_set, int K) {
  if (x0_set.empty()) throw InputError("verify_exponential_decay: x0_set is empty");
  if (K < 1) throw ParameterError("verify_exponential_decay: K must be >= 1");
  const int m = G.input_dim();
  const Signal u_zero = Signal::zero(m, K);

  DecayResult result{0.0, true};
  int usable_runs = 0;
  for (const auto& x0 : x0_set) {
    if (x0.norm() == 0.0) continue;
    ++usable_runs;
    const auto run = interconnect(G, phi, u_zero, u_zero, K, x0);

    // ||x[k]|| / rho^k, k = 0..K.
    std::vector<double> ratio(K + 1);
    double w = 1.0;
    for (int k = 0; k <= K; ++k) {
      ratio[k] = run.states.col(k).norm() / w;
      w *= rho.rho();
    }
    const double x0_norm = x0.norm();
    for (int k = 0; k <= K; ++k) {
      result.c_fit = std::max(result.c_fit, ratio[k] / x0_norm);
    }

    // Growth trend: least-squares slope of log ratio over the last quartile.
    const int start = K - K / 4;
    double sk = 0.0, sv = 0.0, skk = 0.0, skv = 0.0;
    int count = 0;
    for (int k = start; k <= K; ++k) {
      if (ratio[k] <= 0.0) continue;  // exact zeros: already decayed
      const double v = std::log(ratio[k]);
      sk += k;
      sv += v;
      skk += static_cast<double>(k) * k;
      skv += k * v;
      ++count;
    }
    if (count >= 2) {
      const double denom = count * skk - sk * sk;
      const double slope = denom == 0.0 ? 0.0 : (count * skv - sk * sv) / denom;
      if (slope > 1e-6) result.pass = false;
    }
  }
  if (usable_runs == 0) {
    throw InputError("verify_exponential_decay: all initial states are zero");
  }
  if (!std::isfinite(result.c_fit)) result.pass = false;
  return result;
}

Nonlinearity random_sector_gain(const QuadSpec& M, int T, Rng& rng) {
  std::vector<double> gains(T + 1);
  if (const auto interval = sector_interval_of(M)) {
    for (auto& c : gains) c = rng.uniform(interval->first, interval->second);
    return Nonlinearity::time_varying(std::move(gains));
  }
  // Not an interval sector: rejection-sample gains on the pointwise form
  // M11 + 2 M12 c + M22 c^2 >= 0.
  const auto admissible = [&](double c) {
    return M.k11() + 2.0 * M.k12() * c + M.k22() * c * c >= 0.0;
  };
  for (auto& c : gains) {
    bool found = false;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double candidate = std::tan(M_PI * (rng.uniform() - 0.5));  // heavy-tailed
      if (admissible(candidate)) {
        c = candidate;
        found = true;
        break;
      }
    }
    if (!found) {
      throw ParameterError("random_sector_gain: could not sample a gain satisfying M");
    }
  }
  return Nonlinearity::time_varying(std::move(gains));
}

}  // namespace sectorcert
