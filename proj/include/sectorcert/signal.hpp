#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "sectorcert/errors.hpp"

namespace sectorcert {

/// Exponential weight rho in (0, 1].  rho = 1 reproduces the unweighted case.
class Weight {
 public:
  Weight() = default;
  explicit Weight(double rho) : rho_(rho) {
    if (!(rho > 0.0) || rho > 1.0) {
      throw ParameterError("weight rho must lie in (0, 1], got " + std::to_string(rho));
    }
  }

  [[nodiscard]] double rho() const { return rho_; }
  [[nodiscard]] bool is_unweighted() const { return rho_ == 1.0; }

 private:
  double rho_ = 1.0;
};

/// Parameters of the cumulative semi-inner product: horizon T and weight rho.
struct SipConfig {
  int horizon = 0;
  Weight weight = {};

  SipConfig() = default;
  explicit SipConfig(int T, Weight w = {}) : horizon(T), weight(w) {
    if (T < 0) throw HorizonError("sip horizon must be >= 0, got " + std::to_string(T));
  }
};

/// Finite-horizon vector-valued sequence: samples x[0], ..., x[T] in R^m.
///
/// Stored column-per-time-step.  Semantically the signal is zero-extended
/// beyond its horizon; all cumulative forms read at most samples 0..T.
class Signal {
 public:
  /// samples: m x (T+1) matrix, column k is x[k].
  explicit Signal(Eigen::MatrixXd samples) : samples_(std::move(samples)) {
    if (samples_.rows() < 1) throw DimensionError("signal dimension must be >= 1");
    if (samples_.cols() < 1) throw HorizonError("signal must contain at least one sample");
  }

  static Signal zero(int dim, int horizon) {
    if (dim < 1) throw DimensionError("signal dimension must be >= 1");
    if (horizon < 0) throw HorizonError("signal horizon must be >= 0");
    return Signal(Eigen::MatrixXd::Zero(dim, horizon + 1));
  }

  /// Scalar (m = 1) signal from a list of values.
  static Signal scalar(const std::vector<double>& values) {
    Eigen::MatrixXd s(1, static_cast<Eigen::Index>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) s(0, static_cast<Eigen::Index>(k)) = values[k];
    return Signal(std::move(s));
  }

  /// Inverse of stacked(): v = [x[0]; x[1]; ...; x[T]] with each block of size dim.
  static Signal from_stacked(const Eigen::VectorXd& v, int dim) {
    if (dim < 1) throw DimensionError("signal dimension must be >= 1");
    if (v.size() == 0 || v.size() % dim != 0) {
      throw DimensionError("stacked vector length must be a positive multiple of dim");
    }
    const Eigen::Index len = v.size() / dim;
    Eigen::MatrixXd s(dim, len);
    for (Eigen::Index k = 0; k < len; ++k) s.col(k) = v.segment(k * dim, dim);
    return Signal(std::move(s));
  }

  [[nodiscard]] int dim() const { return static_cast<int>(samples_.rows()); }
  [[nodiscard]] int horizon() const { return static_cast<int>(samples_.cols()) - 1; }
  [[nodiscard]] int length() const { return static_cast<int>(samples_.cols()); }

  [[nodiscard]] Eigen::VectorXd at(int k) const { return samples_.col(k); }
  [[nodiscard]] const Eigen::MatrixXd& samples() const { return samples_; }

  /// Column-stacked vector [x[0]; x[1]; ...; x[T]].
  [[nodiscard]] Eigen::VectorXd stacked() const {
    return Eigen::Map<const Eigen::VectorXd>(samples_.data(), samples_.size());
  }

 private:
  Eigen::MatrixXd samples_;
};

/// Weighted cumulative semi-inner product
///   <x, y>_{rho,T} = sum_{k=0}^{T} rho^{-2k} x[k].y[k].
double sip(const Signal& x, const Signal& y, const SipConfig& cfg);

/// sqrt(<x, x>_{rho,T}).
double seminorm(const Signal& x, const SipConfig& cfg);

/// Signal agreeing with x up to index T and zero beyond, stored at length
/// max(x.horizon, T) + 1.
Signal truncate(const Signal& x, int T);

/// K11 <w,w> + 2 K12 <w,xi> + K22 <xi,xi> under cfg, for symmetric 2x2 K.
double quad_form(const Signal& w, const Signal& xi, const Eigen::Matrix2d& K,
                 const SipConfig& cfg);

/// Two-channel composition: z[k] = [top[k]; bottom[k]].
Signal stack2(const Signal& top, const Signal& bottom);

/// Inverse of stack2 for even-dimensional signals.
std::pair<Signal, Signal> split2(const Signal& s);

/// Pointwise reweighting x[k] -> rho^{-k} x[k] (the weighted/unweighted bridge).
Signal descale(const Signal& x, const Weight& weight);

/// Pointwise reweighting x[k] -> rho^{k} x[k]; inverse of descale.
Signal rescale(const Signal& x, const Weight& weight);

}  // namespace sectorcert
