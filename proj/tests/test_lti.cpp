#include <doctest.h>

#include <complex>

#include "sectorcert/lti.hpp"
#include "test_util.hpp"

using namespace sectorcert;

namespace {

StateSpace unit_delay() {
  Eigen::MatrixXd A(1, 1), B(1, 1), C(1, 1), D(1, 1);
  A << 0.0;
  B << 1.0;
  C << 1.0;
  D << 0.0;
  return StateSpace(A, B, C, D);
}

StateSpace first_order(double a) {
  Eigen::MatrixXd A(1, 1), B(1, 1), C(1, 1), D(1, 1);
  A << a;
  B << 1.0;
  C << 1.0;
  D << 0.0;
  return StateSpace(A, B, C, D);
}

Eigen::MatrixXd scalar1x1(double v) {
  Eigen::MatrixXd M(1, 1);
  M << v;
  return M;
}

}  // namespace

TEST_CASE("simulate_lti on hand examples") {
  const auto delay = simulate_lti(unit_delay(), Signal::scalar({1, 0, 0}));
  CHECK(delay.y.samples()(0, 0) == 0.0);
  CHECK(delay.y.samples()(0, 1) == 1.0);
  CHECK(delay.y.samples()(0, 2) == 0.0);

  const auto gain = simulate_lti(StateSpace::static_gain(scalar1x1(2.0)),
                                 Signal::scalar({1, 2}));
  CHECK(gain.y.samples()(0, 0) == 2.0);
  CHECK(gain.y.samples()(0, 1) == 4.0);
  CHECK(gain.states.rows() == 0);

  const auto lag = simulate_lti(first_order(0.5), Signal::scalar({1, 0, 0}));
  CHECK(lag.y.samples()(0, 0) == 0.0);
  CHECK(lag.y.samples()(0, 1) == 1.0);
  CHECK(lag.y.samples()(0, 2) == 0.5);
}

TEST_CASE("simulate_lti validates dimensions") {
  CHECK_THROWS_AS(simulate_lti(unit_delay(), Signal::zero(2, 3)), DimensionError);
  CHECK_THROWS_AS(simulate_lti(unit_delay(), Signal::zero(1, 3), Eigen::VectorXd::Zero(2)),
                  DimensionError);
}

TEST_CASE("impulse_response on hand examples") {
  const auto delay = impulse_response(unit_delay(), 3);
  CHECK(delay[0](0, 0) == 0.0);
  CHECK(delay[1](0, 0) == 1.0);
  CHECK(delay[2](0, 0) == 0.0);

  const auto gain = impulse_response(StateSpace::static_gain(scalar1x1(2.0)), 2);
  CHECK(gain[0](0, 0) == 2.0);
  CHECK(gain[1](0, 0) == 0.0);

  const auto lag = impulse_response(first_order(0.5), 3);
  CHECK(lag[0](0, 0) == 0.0);
  CHECK(lag[1](0, 0) == 1.0);
  CHECK(lag[2](0, 0) == 0.5);
  CHECK(lag[3](0, 0) == 0.25);
}

TEST_CASE("toeplitz_matrix on hand examples") {
  Eigen::MatrixXd shift(3, 3);
  shift << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  CHECK(toeplitz_matrix(unit_delay(), 2, Weight()) == shift);

  CHECK(toeplitz_matrix(StateSpace::static_gain(scalar1x1(2.0)), 1, Weight()) ==
        2.0 * Eigen::MatrixXd::Identity(2, 2));

  Eigen::MatrixXd lag(3, 3);
  lag << 0, 0, 0, 1, 0, 0, 0.5, 1, 0;
  CHECK((toeplitz_matrix(first_order(0.5), 2, Weight()) - lag).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transfer_eval on hand examples") {
  CHECK(std::abs(transfer_eval(unit_delay(), 1.0)(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(transfer_eval(StateSpace::static_gain(scalar1x1(2.0)), 0.3)(0, 0) - 2.0) <
        1e-14);
  CHECK(std::abs(transfer_eval(first_order(0.5), 1.0)(0, 0) - 2.0) < 1e-14);
  CHECK_THROWS_AS(transfer_eval(first_order(0.5), 0.5), SingularityError);
}

TEST_CASE("rho_scale definition and identity case") {
  const StateSpace G = first_order(0.5);
  const StateSpace Gs = rho_scale(G, Weight(0.8));
  CHECK(Gs.A(0, 0) == doctest::Approx(0.625));
  CHECK(Gs.B(0, 0) == doctest::Approx(1.25));
  CHECK(Gs.C == G.C);
  CHECK(Gs.D == G.D);

  const StateSpace G1 = rho_scale(G, Weight(1.0));
  CHECK(G1.A == G.A);
  CHECK(G1.B == G.B);
}

TEST_CASE("rho_scale bridge: scaled simulation matches descaled response") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpace G = testutil::random_schur_siso(rng);
    const Weight w(rng.uniform(0.5, 1.0));
    const int T = rng.uniform_int(1, 16);
    const Signal u = testutil::random_signal(rng, 1, T);

    const Signal lhs = descale(simulate_lti(G, u).y, w);
    const Signal rhs = simulate_lti(rho_scale(G, w), descale(u, w)).y;
    CHECK((lhs.samples() - rhs.samples()).cwiseAbs().maxCoeff() <
          1e-10 * (1.0 + lhs.samples().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("is_schur with margin") {
  CHECK(is_schur(first_order(0.5)));
  CHECK_FALSE(is_schur(first_order(1.0)));
  CHECK(is_schur(StateSpace::static_gain(scalar1x1(5.0))));

  Eigen::MatrixXd A(2, 2), B(2, 1), C(1, 2), D(1, 1);
  A << 0, 1, -0.25, 1;  // eigenvalues 1/2, 1/2
  B << 0, 1;
  C << 1, 0;
  D << 0;
  CHECK(is_schur(StateSpace(A, B, C, D)));
  CHECK(spectral_radius(StateSpace(A, B, C, D)) == doctest::Approx(0.5));
}

TEST_CASE("causality: truncated input gives identical truncated output") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpace G = testutil::random_schur_siso(rng);
    const int T_full = rng.uniform_int(4, 20);
    const int T = rng.uniform_int(0, T_full - 1);
    const Signal u = testutil::random_signal(rng, 1, T_full);

    const Signal y_full = simulate_lti(G, u).y;
    const Signal y_trunc = simulate_lti(G, truncate(u, T)).y;
    CHECK((y_full.samples().leftCols(T + 1) - y_trunc.samples().leftCols(T + 1))
              .cwiseAbs()
              .maxCoeff() < 1e-12 * (1.0 + y_full.samples().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("toeplitz consistency with the scaled simulation") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpace G = testutil::random_schur_siso(rng);
    const Weight w(rng.uniform(0.5, 1.0));
    const int T = rng.uniform_int(0, 16);
    const Signal u = testutil::random_signal(rng, 1, T);

    const Eigen::VectorXd stacked = toeplitz_matrix(G, T, w) * u.stacked();
    const Signal direct = simulate_lti(rho_scale(G, w), u).y;
    CHECK((stacked - direct.stacked()).cwiseAbs().maxCoeff() <
          1e-10 * (1.0 + direct.stacked().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("linearity of the zero-state response") {
  Rng rng(31);
  const StateSpace G = testutil::random_schur_siso(rng);
  const int T = 12;
  const Signal u = testutil::random_signal(rng, 1, T);
  const Signal v = testutil::random_signal(rng, 1, T);
  const double a = 1.7, b = -0.4;

  const Signal mixed = simulate_lti(G, Signal(a * u.samples() + b * v.samples())).y;
  const Eigen::MatrixXd expect =
      a * simulate_lti(G, u).y.samples() + b * simulate_lti(G, v).y.samples();
  CHECK((mixed.samples() - expect).cwiseAbs().maxCoeff() <
        1e-11 * (1.0 + expect.cwiseAbs().maxCoeff()));
}

TEST_CASE("transfer_eval matches the DFT of a long truncated impulse response") {
  Rng rng(37);
  for (int trial = 0; trial < 3; ++trial) {
    const StateSpace G = testutil::random_schur_siso(rng, 3, 0.3, 0.9);
    const int T = 4000;
    const auto h = impulse_response(G, T);
    for (const double omega : {0.0, 0.5, 1.0, 2.0, 3.1}) {
      std::complex<double> dft = 0.0;
      for (int k = 0; k <= T; ++k) dft += h[k](0, 0) * std::polar(1.0, -omega * k);
      const std::complex<double> direct = transfer_eval(G, std::polar(1.0, omega))(0, 0);
      CHECK(std::abs(dft - direct) < 1e-6);
    }
  }
}

TEST_CASE("StateSpace validates shapes and finiteness") {
  Eigen::MatrixXd A(2, 1);
  A << 1, 2;
  CHECK_THROWS_AS(StateSpace(A, A, A, A), DimensionError);
  Eigen::MatrixXd nan1x1 = scalar1x1(std::nan(""));
  CHECK_THROWS_AS(StateSpace::static_gain(nan1x1), MatrixError);
}
