#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "sectorcert/errors.hpp"

namespace sectorcert {

/// Which operator a quadratic constraint applies to.
enum class Side { g, phi };

enum class Feedback { positive, negative };

const char* to_string(Side s);
const char* to_string(Feedback f);

/// Symmetric 2x2 quadratic-constraint matrix with side and feedback tags.
/// Symmetric by construction: stored as (k11, k12, k22).
class QuadSpec {
 public:
  QuadSpec(double k11, double k12, double k22, Side side, Feedback feedback);

  /// Requires K(0,1) == K(1,0) exactly; otherwise MatrixError.
  static QuadSpec from_matrix(const Eigen::Matrix2d& K, Side side, Feedback feedback);

  [[nodiscard]] double k11() const { return k11_; }
  [[nodiscard]] double k12() const { return k12_; }
  [[nodiscard]] double k22() const { return k22_; }
  [[nodiscard]] Side side() const { return side_; }
  [[nodiscard]] Feedback feedback() const { return feedback_; }

  [[nodiscard]] Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d K;
    K << k11_, k12_, k12_, k22_;
    return K;
  }

 private:
  double k11_, k12_, k22_;
  Side side_;
  Feedback feedback_;
};

/// A (M, N) pair from the preset library, with the parameters that built it
/// and the preset's validity predicate (last column of the table).
struct SectorPair {
  QuadSpec M;  ///< Phi-side constraint.
  QuadSpec N;  ///< G-side constraint.
  std::string preset;
  std::map<std::string, double> params;
  bool valid = false;
};

enum class PresetName { conic, extended_conic, passivity, small_gain };

const char* to_string(PresetName name);
PresetName preset_from_string(const std::string& name);

/// Dispatch by name; `params` keyed as documented per preset
/// (small_gain: gamma1, gamma2; passivity: eps1, delta1, eps2, delta2;
/// conic / extended_conic: a, b, delta, Delta).
SectorPair preset(PresetName name, const std::map<std::string, double>& params);

/// Small gain: M = [[g2, 0], [0, -1/g2]], N = [[-1/g1, 0], [0, g1]];
/// valid iff g1 g2 < 1.  Gains must be positive.
SectorPair small_gain(double gamma1, double gamma2);

/// Extended passivity: M = [[-e2, 1/2], [1/2, -d2]], N = [[-d1, -1/2], [-1/2, -e1]];
/// valid iff d1 + e2 > 0 and d2 + e1 > 0.
SectorPair passivity(double eps1, double delta1, double eps2, double delta2);

/// Conic sector: Phi strictly inside by margin Delta, or G strictly outside
/// by margin delta.  Exactly one margin may be positive; both zero is
/// constructible but invalid.  Normalizations b-a-2*Delta and b-a+2ab*delta
/// must be positive; delta > 0 additionally requires a, b nonzero.
SectorPair conic(double a, double b, double delta, double Delta);

/// Extended conic sector (the roles of inside/outside swapped; handles
/// unstable G).  Same parameter rules as conic with normalizations
/// b-a+2*Delta and b-a-2ab*delta.
SectorPair extended_conic(double a, double b, double delta, double Delta);

/// Pointwise sector [a, b] as the unnormalized product form
/// (phi - a xi)(b xi - phi) >= 0:  M = [[-ab, (a+b)/2], [(a+b)/2, -1]].
QuadSpec sector_interval_to_M(double a, double b);

/// Inverse of sector_interval_to_M up to positive scaling; nullopt when K
/// does not describe an interval sector (K22 >= 0 or complex endpoints).
std::optional<std::pair<double, double>> sector_interval_of(const QuadSpec& K);

/// Negate off-diagonal entries and toggle the feedback tag (the N ~ Ntilde
/// swap between feedback conventions).
QuadSpec flip_sign(const QuadSpec& K);

struct CompatibilityResult {
  bool ok = false;     ///< lambda_max(M + N) < 0
  double eta = 0.0;    ///< -lambda_max(M + N); the margin when ok
};

/// Checks M + N negative definite.  M must be Phi-side, N G-side, with
/// matching feedback tags.
CompatibilityResult compatibility(const QuadSpec& M, const QuadSpec& N);

/// lambda_max(M) > 0; required for the necessity direction.
bool indefinite(const QuadSpec& M);

/// K1 <= K2 in the semidefinite order (lambda_max(K1 - K2) <= 0).
bool nested(const QuadSpec& K1, const QuadSpec& K2);

/// Largest eigenvalue of a symmetric 2x2 matrix, in closed form.
double sym2_lambda_max(double k11, double k12, double k22);

}  // namespace sectorcert
