#pragma once

#include <cstdint>

#include "arraycav/extract.hpp"

namespace arraycav {

struct MotionEstimate {
  double sigma = 0.0;      // oscillator length [lambda0]
  double eta = 0.0;        // k0 sigma
  double kappa_mot = 0.0;  // eta^2 gamma0
  double c_mot = 0.0;
  double v0_over_er = 0.0;
  double a = 0.0;
};

// sigma = (a / (pi sqrt(2))) (Er / V0)^{1/4}.
double lamb_dicke_sigma(double v0_over_er, double a);

// C = (9 / 8 pi^3) (lambda0/w0)^2 (lambda0/a)^4 sqrt(V0/Er) gamma_ratio.
double motion_cooperativity(double w0, double a, double v0_over_er,
                            double gamma_ratio);

MotionEstimate trap_estimates(double v0_over_er, double a, double w0,
                              double gamma_ratio = 1.0);

struct EnsembleStats {
  CavityParams mean;
  CavityParams standard_error;
  int n_ok = 0;
  int n_failed = 0;
};

// Runs the extractor on n_realizations frozen-disorder samples (realization k
// is seeded with seed ^ k); per-parameter mean and standard error. Failed
// realizations are skipped and counted. Targets stay pinned unless
// displace_targets is set.
EnsembleStats frozen_average(const DipoleSet& ideal, const Eigen::Vector3d& sigma,
                             int n_realizations, std::uint64_t seed,
                             const CavityExtractor& extractor,
                             bool displace_targets = false,
                             Warnings* warnings = nullptr);

// Extractor run on the fast-motion rescaled Hamiltonian (couplings times
// e^{-eta^2}, drive times e^{-eta^2/2}).
CavityParams fast_motion_params(const DipoleSet& ideal, double sigma,
                                const CavityExtractor& extractor,
                                Warnings* warnings = nullptr);

}  // namespace arraycav
