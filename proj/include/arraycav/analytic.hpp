#pragma once

#include <optional>

#include "arraycav/common.hpp"

namespace arraycav {

// Closed-form design estimates in (lambda0, gamma0) units.
struct AnalyticEstimates {
  double gamma0_collective = 0.0;  // Gamma0
  double g_est = 0.0;
  double kappa_est = 0.0;
  double c_est = 0.0;
  double r_curvature = 0.0;
  std::optional<double> zeta;    // requires Q
  std::optional<double> g_conv;  // requires Q
};

// Gamma0 = 3 pi / (k0 a)^2. Warns when a approaches lambda0 (Bragg validity).
double collective_linewidth(double a, Warnings* warnings = nullptr);

// g_est   = sqrt(9 pi gamma_a gamma0) / (k0^2 w0 a)
// kappa   = (1 - R) Gamma0 / 2
// C_est   = (6/pi^2) (gamma_a/gamma_3d) (1/(1-R)) (lambda0/w0)^2
// R_curv  = L/2 + k0^2 w0^4 / (2 L)
// zeta    = Gamma0 L pi / Q,  g_conv from the Gaussian mode volume pi w0^2 L/4
AnalyticEstimates estimates(double a, double L, double w0, double gamma_a,
                            double r_mirror, double gamma_ratio = 1.0,
                            std::optional<double> quality_factor = {},
                            Warnings* warnings = nullptr);

// Effective waist induced by a quadratic Stark profile:
//   w0 = (L lambda0 w_stark^2 Gamma0 / (4 pi alpha))^(1/4).
// Warns when the k0 w0^2 >> L regime is violated.
double stark_waist(double L, double w_stark, double alpha, double gamma0_collective,
                   Warnings* warnings = nullptr);

}  // namespace arraycav
