#pragma once

#include <Eigen/Core>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sectorcert/lti.hpp"
#include "sectorcert/rng.hpp"
#include "sectorcert/sector.hpp"
#include "sectorcert/signal.hpp"

namespace sectorcert {

/// The nonlinear leg of the loop: a static map applied pointwise in time, a
/// time-varying diagonal gain, a one-step-delayed gain, or a recorded
/// input/output pair (the relation produced by counterexample synthesis).
class Nonlinearity {
 public:
  enum class Kind { static_map, time_varying_gain, delay_gain, pair_relation };
  using MapFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  static Nonlinearity zero();
  static Nonlinearity static_gain(double c);
  /// Componentwise clamp to [-level, level].
  static Nonlinearity saturation(double level);
  /// a xi + (b - a) sat_level(xi): lies in the pointwise sector [a, b].
  static Nonlinearity sector_saturation(double a, double b, double level);
  static Nonlinearity custom_map(std::string label, MapFn fn);
  static Nonlinearity time_varying(std::vector<double> gains);
  /// y2[k] = c e2[k-1]; strictly causal, so it breaks the algebraic loop.
  static Nonlinearity delayed_gain(double c);
  static Nonlinearity pair(Signal e2, Signal y2);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool strictly_causal() const { return kind_ == Kind::delay_gain; }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] const std::map<std::string, double>& params() const { return params_; }
  [[nodiscard]] const std::vector<double>& gains() const { return gains_; }
  [[nodiscard]] const Signal& recorded_e2() const;
  [[nodiscard]] const Signal& recorded_y2() const;

  /// Pointwise evaluation at step k (static_map and time_varying_gain only).
  [[nodiscard]] Eigen::VectorXd apply(int k, const Eigen::VectorXd& xi) const;

 private:
  Nonlinearity(Kind kind, std::string label) : kind_(kind), label_(std::move(label)) {}

  Kind kind_;
  std::string label_;
  std::map<std::string, double> params_;
  MapFn map_;
  std::vector<double> gains_;
  std::optional<Signal> pair_e2_;
  std::optional<Signal> pair_y2_;
};

struct LoopTrajectory {
  Signal e;  ///< [e1; e2]
  Signal y;  ///< [y1; y2]
  /// State trajectory of G, x[0..T+1] (n x (T+2)).
  Eigen::MatrixXd states;
};

/// Simulates the interconnection
///   e1 = u1 + y2,  y2 = Phi e2,  e2 = u2 + y1,  y1 = G e1
/// for k = 0..T.  The per-step algebraic loop is resolved by causality of
/// Phi, by D = 0, or by damped fixed-point iteration; residuals of all four
/// equations are asserted to 1e-10 relative.
LoopTrajectory interconnect(const StateSpace& G, const Nonlinearity& phi, const Signal& u1,
                            const Signal& u2, int T,
                            const Eigen::VectorXd& x0 = Eigen::VectorXd());

/// Samples the pointwise sector form <[xi; phi(xi)], M [xi; phi(xi)]> on
/// random inputs plus deterministic probes; true iff all values >= -1e-9.
bool check_pointwise_sector(const Nonlinearity& phi, const QuadSpec& M, int samples,
                            int dim = 1);

/// max over input pairs of seminorm(y) / seminorm(u) at (T, weight); pairs
/// with seminorm(u) = 0 are skipped.
double empirical_gain(const StateSpace& G, const Nonlinearity& phi,
                      const std::vector<std::pair<Signal, Signal>>& inputs, int T,
                      const Weight& weight);

struct DecayResult {
  double c_fit = 0.0;
  bool pass = false;
};

/// Simulates the autonomous loop (u = 0) from each initial state and fits
///   c_fit = max_k ||x[k]|| / (rho^k ||x[0]||);
/// passes iff c_fit is finite and log(||x[k]|| / rho^k) shows no growth
/// trend (least-squares slope <= 1e-6 over the last quartile of K).
DecayResult verify_exponential_decay(const StateSpace& G, const Nonlinearity& phi,
                                     const Weight& rho,
                                     const std::vector<Eigen::VectorXd>& x0_set, int K);

/// Random time-varying gain inside the sector interval induced by M
/// (rejection sampling on the pointwise form when M is not an interval).
Nonlinearity random_sector_gain(const QuadSpec& M, int T, Rng& rng);

}  // namespace sectorcert
