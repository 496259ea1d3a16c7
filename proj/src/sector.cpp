#include "sectorcert/sector.hpp"

#include <cmath>

namespace sectorcert {

const char* to_string(Side s) { return s == Side::g ? "g" : "phi"; }

const char* to_string(Feedback f) { return f == Feedback::positive ? "positive" : "negative"; }

QuadSpec::QuadSpec(double k11, double k12, double k22, Side side, Feedback feedback)
    : k11_(k11), k12_(k12), k22_(k22), side_(side), feedback_(feedback) {
  if (!std::isfinite(k11) || !std::isfinite(k12) || !std::isfinite(k22)) {
    throw MatrixError("QuadSpec: entries must be finite");
  }
}

QuadSpec QuadSpec::from_matrix(const Eigen::Matrix2d& K, Side side, Feedback feedback) {
  if (K(0, 1) != K(1, 0)) throw MatrixError("QuadSpec: matrix must be symmetric");
  return QuadSpec(K(0, 0), K(0, 1), K(1, 1), side, feedback);
}

double sym2_lambda_max(double k11, double k12, double k22) {
  const double mean = 0.5 * (k11 + k22);
  const double half_gap = 0.5 * (k11 - k22);
  return mean + std::hypot(half_gap, k12);
}

const char* to_string(PresetName name) {
  switch (name) {
    case PresetName::conic: return "conic";
    case PresetName::extended_conic: return "extended_conic";
    case PresetName::passivity: return "passivity";
    case PresetName::small_gain: return "small_gain";
  }
  return "?";
}

PresetName preset_from_string(const std::string& name) {
  if (name == "conic") return PresetName::conic;
  if (name == "extended_conic") return PresetName::extended_conic;
  if (name == "passivity") return PresetName::passivity;
  if (name == "small_gain") return PresetName::small_gain;
  throw ParameterError("unknown preset '" + name + "'");
}

namespace {

double require(const std::map<std::string, double>& params, const std::string& key,
               const char* preset_name) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw ParameterError(std::string(preset_name) + " preset requires parameter '" + key + "'");
  }
  return it->second;
}

/// Shared parameter screening for the two conic rows.  Returns the (M, N)
/// normalization denominators.
std::pair<double, double> conic_denominators(double a, double b, double delta, double Delta,
                                             double m_denom, double n_denom,
                                             const char* name) {
  if (!(delta >= 0.0) || !(Delta >= 0.0)) {
    throw ParameterError(std::string(name) + ": margins delta and Delta must be >= 0");
  }
  if (delta > 0.0 && Delta > 0.0) {
    throw ParameterError(std::string(name) +
                         ": margins delta and Delta cannot both be positive");
  }
  if (delta > 0.0 && a * b == 0.0) {
    throw ParameterError(std::string(name) + ": margin delta requires a and b nonzero");
  }
  if (m_denom == 0.0 || n_denom == 0.0) {
    throw ParameterError(std::string(name) + ": zero normalization denominator");
  }
  if (m_denom < 0.0 || n_denom < 0.0) {
    throw ParameterError(std::string(name) + ": normalization denominators must be positive");
  }
  return {m_denom, n_denom};
}

}  // namespace

SectorPair small_gain(double gamma1, double gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) {
    throw ParameterError("small_gain: gains must be positive");
  }
  QuadSpec M(gamma2, 0.0, -1.0 / gamma2, Side::phi, Feedback::positive);
  QuadSpec N(-1.0 / gamma1, 0.0, gamma1, Side::g, Feedback::positive);
  return {M, N, "small_gain", {{"gamma1", gamma1}, {"gamma2", gamma2}},
          gamma1 * gamma2 < 1.0};
}

SectorPair passivity(double eps1, double delta1, double eps2, double delta2) {
  QuadSpec M(-eps2, 0.5, -delta2, Side::phi, Feedback::positive);
  QuadSpec N(-delta1, -0.5, -eps1, Side::g, Feedback::positive);
  return {M, N, "passivity",
          {{"eps1", eps1}, {"delta1", delta1}, {"eps2", eps2}, {"delta2", delta2}},
          delta1 + eps2 > 0.0 && delta2 + eps1 > 0.0};
}

SectorPair conic(double a, double b, double delta, double Delta) {
  const auto [md, nd] = conic_denominators(a, b, delta, Delta, b - a - 2.0 * Delta,
                                           b - a + 2.0 * a * b * delta, "conic");
  QuadSpec M(-(a + Delta) * (b - Delta) / md, -(a + b) / (2.0 * md), -1.0 / md, Side::phi,
             Feedback::positive);
  QuadSpec N(a * b / nd, (a + b) / (2.0 * nd), (1.0 + a * delta) * (1.0 - b * delta) / nd,
             Side::g, Feedback::positive);
  return {M, N, "conic", {{"a", a}, {"b", b}, {"delta", delta}, {"Delta", Delta}},
          a < b && (delta > 0.0 || Delta > 0.0)};
}

SectorPair extended_conic(double a, double b, double delta, double Delta) {
  const auto [md, nd] = conic_denominators(a, b, delta, Delta, b - a + 2.0 * Delta,
                                           b - a - 2.0 * a * b * delta, "extended_conic");
  QuadSpec M((a - Delta) * (b + Delta) / md, (a + b) / (2.0 * md), 1.0 / md, Side::phi,
             Feedback::positive);
  QuadSpec N(-a * b / nd, -(a + b) / (2.0 * nd),
             -(1.0 - a * delta) * (1.0 + b * delta) / nd, Side::g, Feedback::positive);
  return {M, N, "extended_conic", {{"a", a}, {"b", b}, {"delta", delta}, {"Delta", Delta}},
          a < b && (delta > 0.0 || Delta > 0.0)};
}

SectorPair preset(PresetName name, const std::map<std::string, double>& params) {
  switch (name) {
    case PresetName::small_gain:
      return small_gain(require(params, "gamma1", "small_gain"),
                        require(params, "gamma2", "small_gain"));
    case PresetName::passivity:
      return passivity(require(params, "eps1", "passivity"),
                       require(params, "delta1", "passivity"),
                       require(params, "eps2", "passivity"),
                       require(params, "delta2", "passivity"));
    case PresetName::conic:
      return conic(require(params, "a", "conic"), require(params, "b", "conic"),
                   require(params, "delta", "conic"), require(params, "Delta", "conic"));
    case PresetName::extended_conic:
      return extended_conic(require(params, "a", "extended_conic"),
                            require(params, "b", "extended_conic"),
                            require(params, "delta", "extended_conic"),
                            require(params, "Delta", "extended_conic"));
  }
  throw ParameterError("unknown preset");
}

QuadSpec sector_interval_to_M(double a, double b) {
  if (!(a < b)) throw ParameterError("sector interval requires a < b");
  return QuadSpec(-a * b, 0.5 * (a + b), -1.0, Side::phi, Feedback::positive);
}

std::optional<std::pair<double, double>> sector_interval_of(const QuadSpec& K) {
  if (!(K.k22() < 0.0)) return std::nullopt;
  const double scale = -K.k22();
  const double sum = 2.0 * K.k12() / scale;    // a + b
  const double prod = -K.k11() / scale;        // a b
  const double disc = sum * sum - 4.0 * prod;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  return std::make_pair(0.5 * (sum - root), 0.5 * (sum + root));
}

QuadSpec flip_sign(const QuadSpec& K) {
  return QuadSpec(K.k11(), -K.k12(), K.k22(), K.side(),
                  K.feedback() == Feedback::positive ? Feedback::negative
                                                     : Feedback::positive);
}

CompatibilityResult compatibility(const QuadSpec& M, const QuadSpec& N) {
  if (M.side() != Side::phi || N.side() != Side::g) {
    throw ConventionError("compatibility: expected a Phi-side M and a G-side N");
  }
  if (M.feedback() != N.feedback()) {
    throw ConventionError("compatibility: feedback conventions differ");
  }
  const double lmax =
      sym2_lambda_max(M.k11() + N.k11(), M.k12() + N.k12(), M.k22() + N.k22());
  return {lmax < 0.0, -lmax};
}

bool indefinite(const QuadSpec& M) {
  return sym2_lambda_max(M.k11(), M.k12(), M.k22()) > 0.0;
}

bool nested(const QuadSpec& K1, const QuadSpec& K2) {
  if (K1.side() != K2.side() || K1.feedback() != K2.feedback()) {
    throw ConventionError("nested: side or feedback tags differ");
  }
  return sym2_lambda_max(K1.k11() - K2.k11(), K1.k12() - K2.k12(), K1.k22() - K2.k22()) <= 0.0;
}

}  // namespace sectorcert
