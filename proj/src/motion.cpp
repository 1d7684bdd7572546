#include "arraycav/motion.hpp"

#include <cmath>

namespace arraycav {

double lamb_dicke_sigma(double v0_over_er, double a) {
  if (!(v0_over_er > 0.0))
    throw std::domain_error("lamb_dicke_sigma: V0/Er must be positive");
  if (!(a > 0.0)) throw std::invalid_argument("lamb_dicke_sigma: a must be > 0");
  return a / (pi * std::sqrt(2.0)) * std::pow(1.0 / v0_over_er, 0.25);
}

double motion_cooperativity(double w0, double a, double v0_over_er,
                            double gamma_ratio) {
  if (!(w0 > 0.0 && a > 0.0 && v0_over_er > 0.0 && gamma_ratio > 0.0))
    throw std::invalid_argument("motion_cooperativity: inputs must be positive");
  return 9.0 / (8.0 * pi * pi * pi) / (w0 * w0) / (a * a * a * a) *
         std::sqrt(v0_over_er) * gamma_ratio;
}

MotionEstimate trap_estimates(double v0_over_er, double a, double w0,
                              double gamma_ratio) {
  MotionEstimate est;
  est.v0_over_er = v0_over_er;
  est.a = a;
  est.sigma = lamb_dicke_sigma(v0_over_er, a);
  est.eta = k0 * est.sigma;
  est.kappa_mot = est.eta * est.eta;
  est.c_mot = motion_cooperativity(w0, a, v0_over_er, gamma_ratio);
  return est;
}

namespace {

struct Accumulator {
  // Welford over each parameter
  int n = 0;
  CavityParams mean{}, m2{};

  static void step(double& mean, double& m2, double x, int n) {
    double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  void add(const CavityParams& p) {
    ++n;
    step(mean.g, m2.g, p.g, n);
    step(mean.kappa, m2.kappa, p.kappa, n);
    step(mean.omega_c, m2.omega_c, p.omega_c, n);
    step(mean.gamma_3d, m2.gamma_3d, p.gamma_3d, n);
    step(mean.cooperativity, m2.cooperativity, p.cooperativity, n);
  }

  CavityParams standard_error() const {
    CavityParams se{};
    if (n < 2) return se;
    const double scale = 1.0 / (n * (n - 1.0));
    se.g = std::sqrt(m2.g * scale);
    se.kappa = std::sqrt(m2.kappa * scale);
    se.omega_c = std::sqrt(m2.omega_c * scale);
    se.gamma_3d = std::sqrt(m2.gamma_3d * scale);
    se.cooperativity = std::sqrt(m2.cooperativity * scale);
    return se;
  }
};

}  // namespace

EnsembleStats frozen_average(const DipoleSet& ideal, const Eigen::Vector3d& sigma,
                             int n_realizations, std::uint64_t seed,
                             const CavityExtractor& extractor,
                             bool displace_targets, Warnings* warnings) {
  if (n_realizations < 2)
    throw std::invalid_argument("frozen_average: need at least 2 realizations");
  if (ideal.a > 0.0 && ideal.a < 0.4)
    warn(warnings, "frozen_average: a < 0.4 lambda0, mode hybridization makes "
                   "frozen-motion loss regime-sensitive");
  Accumulator acc;
  int failed = 0;
  for (int k = 0; k < n_realizations; ++k) {
    DipoleSet sample = sample_frozen_disorder(ideal, sigma,
                                              seed ^ static_cast<std::uint64_t>(k),
                                              displace_targets);
    try {
      acc.add(extractor(sample, std::nullopt));
    } catch (const std::exception& e) {
      ++failed;
      warn(warnings, "frozen_average: realization " + std::to_string(k) +
                         " failed: " + e.what());
    }
  }
  if (acc.n == 0) throw numerical_failure("frozen_average: every realization failed");
  EnsembleStats stats;
  stats.mean = acc.mean;
  stats.standard_error = acc.standard_error();
  stats.n_ok = acc.n;
  stats.n_failed = failed;
  return stats;
}

CavityParams fast_motion_params(const DipoleSet& ideal, double sigma,
                                const CavityExtractor& extractor,
                                Warnings* warnings) {
  if (sigma < 0.0)
    throw std::invalid_argument("fast_motion_params: sigma must be >= 0");
  if (k0 * sigma > 0.5)
    warn(warnings, "fast_motion_params: eta > 0.5, outside the Lamb-Dicke regime");
  return extractor(ideal, sigma);
}

}  // namespace arraycav
