#include "arraycav/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace arraycav {

double collective_linewidth(double a, Warnings* warnings) {
  if (!(a > 0.0)) throw std::invalid_argument("collective_linewidth: a must be > 0");
  if (a >= 0.9)
    warn(warnings,
         "collective_linewidth: a close to lambda0, Bragg scattering not suppressed");
  const double ka = k0 * a;
  return 3.0 * pi / (ka * ka);
}

AnalyticEstimates estimates(double a, double L, double w0, double gamma_a,
                            double r_mirror, double gamma_ratio,
                            std::optional<double> quality_factor, Warnings* warnings) {
  if (!(a > 0.0 && L > 0.0 && w0 > 0.0 && gamma_a > 0.0 && gamma_ratio > 0.0))
    throw std::invalid_argument("estimates: parameters must be positive");
  if (r_mirror < 0.0 || r_mirror >= 1.0)
    throw std::domain_error("estimates: R must lie in [0, 1)");

  AnalyticEstimates est;
  est.gamma0_collective = collective_linewidth(a, warnings);
  est.g_est = std::sqrt(9.0 * pi * gamma_a) / (k0 * k0 * w0 * a);
  est.kappa_est = 0.5 * (1.0 - r_mirror) * est.gamma0_collective;
  est.c_est = 6.0 / (pi * pi) * gamma_ratio / (1.0 - r_mirror) / (w0 * w0);
  est.r_curvature = 0.5 * L + k0 * k0 * w0 * w0 * w0 * w0 / (2.0 * L);
  if (quality_factor) {
    const double q = *quality_factor;
    est.zeta = est.gamma0_collective * L * pi / q;
    // g_conv^2 = (3 pi / 2) gamma_a omega0 / (k0^3 V), V = pi w0^2 L / 4
    const double mode_volume = pi * w0 * w0 * L / 4.0;
    est.g_conv = std::sqrt(1.5 * pi * gamma_a * q / (k0 * k0 * k0 * mode_volume));
  }
  return est;
}

double stark_waist(double L, double w_stark, double alpha, double gamma0_collective,
                   Warnings* warnings) {
  if (!(L > 0.0 && w_stark > 0.0 && gamma0_collective > 0.0))
    throw std::invalid_argument("stark_waist: parameters must be positive");
  if (!(alpha > 0.0)) {
    warn(warnings, "stark_waist: alpha -> 0 gives an unbounded waist "
                   "(finite arrays saturate instead)");
    return std::numeric_limits<double>::infinity();
  }
  const double w0 = std::pow(
      L * w_stark * w_stark * gamma0_collective / (4.0 * pi * alpha), 0.25);
  if (!(k0 * w0 * w0 > 5.0 * L))
    warn(warnings, "stark_waist: outside the k0 w0^2 >> L regime");
  return w0;
}

}  // namespace arraycav
