#include <doctest.h>

#include <cmath>

#include "arraycav/analytic.hpp"
#include "arraycav/motion.hpp"

using namespace arraycav;

TEST_CASE("collective linewidth") {
  CHECK(collective_linewidth(0.47) == doctest::Approx(1.081).epsilon(5e-4));
  CHECK(collective_linewidth(0.68) == doctest::Approx(0.516).epsilon(1e-3));

  Warnings w;
  double value = collective_linewidth(0.97, &w);
  CHECK(value == doctest::Approx(3.0 * pi / std::pow(k0 * 0.97, 2)));
  CHECK(!w.empty());  // Bragg-validity note

  CHECK_THROWS_AS(collective_linewidth(0.0), std::invalid_argument);
}

TEST_CASE("closed-form cavity estimates") {
  AnalyticEstimates est = estimates(0.47, 1.5, 2.0, 1.0, 0.99);
  CHECK(est.g_est == doctest::Approx(0.1433).epsilon(5e-4));
  CHECK(est.kappa_est == doctest::Approx(0.0054).epsilon(2e-2));
  CHECK(est.c_est == doctest::Approx(15.2).epsilon(2e-3));
  CHECK(est.r_curvature == doctest::Approx(211.3).epsilon(1e-3));
  CHECK(!est.zeta.has_value());

  SUBCASE("zeta/g_conv consistency: g_est^2 = zeta g_conv^2") {
    AnalyticEstimates with_q =
        estimates(0.47, 1.5, 2.0, 1.0, 0.99, 1.0, default_quality_factor);
    REQUIRE(with_q.zeta.has_value());
    REQUIRE(with_q.g_conv.has_value());
    double lhs = with_q.g_est * with_q.g_est;
    double rhs = *with_q.zeta * *with_q.g_conv * *with_q.g_conv;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }

  CHECK_THROWS_AS(estimates(0.47, 1.5, 2.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("stark-induced waist") {
  double gamma0 = collective_linewidth(0.47);
  double w0 = stark_waist(1.5, 500.0, 1750.0, gamma0);
  CHECK(w0 == doctest::Approx(2.07).epsilon(2e-3));

  // quartic-root scaling in alpha
  CHECK(stark_waist(1.5, 500.0, 4.0 * 1750.0, gamma0) ==
        doctest::Approx(w0 * std::pow(4.0, -0.25)));

  Warnings w;
  CHECK(std::isinf(stark_waist(1.5, 500.0, 0.0, gamma0, &w)));
  CHECK(!w.empty());
}

TEST_CASE("trap physics estimates") {
  SUBCASE("oscillator length and Lamb-Dicke parameter") {
    double sigma = lamb_dicke_sigma(2000.0, 0.47);
    CHECK(sigma == doctest::Approx(0.0158).epsilon(2e-3));
    double eta2 = std::pow(k0 * sigma, 2);
    CHECK(eta2 == doctest::Approx(0.00988).epsilon(2e-3));
    // dimensional oracle: eta^2 = 2 (a/lambda0)^2 sqrt(Er/V0)
    CHECK(eta2 == doctest::Approx(2.0 * 0.47 * 0.47 / std::sqrt(2000.0))
                      .epsilon(1e-12));
    // V0 -> infinity pins the atoms
    CHECK(lamb_dicke_sigma(1e12, 0.47) < 1e-3);
    CHECK_THROWS_AS(lamb_dicke_sigma(-1.0, 0.47), std::domain_error);
  }

  SUBCASE("motional cooperativity estimate") {
    CHECK(motion_cooperativity(2.0, 0.47, 2000.0, 1.0) ==
          doctest::Approx(8.31).epsilon(1e-3));
    // quadratic in 1/w0, square root in V0
    double base = motion_cooperativity(2.0, 0.47, 2000.0, 1.0);
    CHECK(motion_cooperativity(4.0, 0.47, 2000.0, 1.0) ==
          doctest::Approx(base / 4.0));
    CHECK(motion_cooperativity(2.0, 0.47, 8000.0, 1.0) ==
          doctest::Approx(base * 2.0));
  }

  SUBCASE("bundled estimate is definitionally consistent") {
    MotionEstimate est = trap_estimates(2000.0, 0.47, 2.0);
    CHECK(est.eta == doctest::Approx(k0 * est.sigma).epsilon(1e-15));
    CHECK(est.kappa_mot == doctest::Approx(est.eta * est.eta).epsilon(1e-12));
  }
}
