#include "sectorcert/signal.hpp"

#include <cmath>
#include <string>

namespace sectorcert {

namespace {

void check_pair(const Signal& x, const Signal& y, const SipConfig& cfg) {
  if (x.dim() != y.dim()) {
    throw DimensionError("sip: signal dimensions differ (" + std::to_string(x.dim()) + " vs " +
                         std::to_string(y.dim()) + ")");
  }
  if (cfg.horizon > x.horizon() || cfg.horizon > y.horizon()) {
    throw HorizonError("sip: horizon " + std::to_string(cfg.horizon) +
                       " exceeds signal length");
  }
}

}  // namespace

double sip(const Signal& x, const Signal& y, const SipConfig& cfg) {
  check_pair(x, y, cfg);
  const double rho = cfg.weight.rho();
  const double step = 1.0 / (rho * rho);
  // Running product rather than pow(); reject (not saturate) on overflow.
  double w = 1.0;
  double acc = 0.0;
  for (int k = 0; k <= cfg.horizon; ++k) {
    if (!std::isfinite(w)) {
      throw NumericsError("sip: weight rho^{-2k} overflows at k = " + std::to_string(k));
    }
    acc += w * x.samples().col(k).dot(y.samples().col(k));
    w *= step;
  }
  return acc;
}

double seminorm(const Signal& x, const SipConfig& cfg) {
  return std::sqrt(sip(x, x, cfg));
}

Signal truncate(const Signal& x, int T) {
  if (T < 0) throw HorizonError("truncate: T must be >= 0");
  const int out_len = std::max(x.horizon(), T) + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.dim(), out_len);
  const int copied = std::min(T, x.horizon()) + 1;
  out.leftCols(copied) = x.samples().leftCols(copied);
  return Signal(std::move(out));
}

double quad_form(const Signal& w, const Signal& xi, const Eigen::Matrix2d& K,
                 const SipConfig& cfg) {
  if (K(0, 1) != K(1, 0)) throw MatrixError("quad_form: K must be symmetric");
  return K(0, 0) * sip(w, w, cfg) + 2.0 * K(0, 1) * sip(w, xi, cfg) +
         K(1, 1) * sip(xi, xi, cfg);
}

Signal stack2(const Signal& top, const Signal& bottom) {
  if (top.dim() != bottom.dim()) throw DimensionError("stack2: channel dimensions differ");
  if (top.horizon() != bottom.horizon()) throw HorizonError("stack2: channel horizons differ");
  Eigen::MatrixXd s(2 * top.dim(), top.length());
  s.topRows(top.dim()) = top.samples();
  s.bottomRows(bottom.dim()) = bottom.samples();
  return Signal(std::move(s));
}

std::pair<Signal, Signal> split2(const Signal& s) {
  if (s.dim() % 2 != 0) throw DimensionError("split2: signal dimension must be even");
  const int m = s.dim() / 2;
  return {Signal(s.samples().topRows(m)), Signal(s.samples().bottomRows(m))};
}

Signal descale(const Signal& x, const Weight& weight) {
  const double step = 1.0 / weight.rho();
  Eigen::MatrixXd out = x.samples();
  double w = 1.0;
  for (int k = 0; k < x.length(); ++k) {
    if (!std::isfinite(w)) {
      throw NumericsError("descale: weight rho^{-k} overflows at k = " + std::to_string(k));
    }
    out.col(k) *= w;
    w *= step;
  }
  return Signal(std::move(out));
}

Signal rescale(const Signal& x, const Weight& weight) {
  const double rho = weight.rho();
  Eigen::MatrixXd out = x.samples();
  double w = 1.0;
  for (int k = 0; k < x.length(); ++k) {
    out.col(k) *= w;
    w *= rho;
  }
  return Signal(std::move(out));
}

}  // namespace sectorcert
