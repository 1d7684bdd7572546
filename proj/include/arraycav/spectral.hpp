#pragma once

#include <Eigen/Dense>

#include "arraycav/interaction.hpp"
#include "arraycav/modes.hpp"

namespace arraycav {

// Target-atom self-energy samples on a frequency grid [gamma0].
struct SpectrumCurve {
  Eigen::VectorXd omega;
  Eigen::VectorXcd sigma;
  double gamma_a = 1.0;

  // A(w) = gamma_a - 2 Im Sigma(w)
  Eigen::VectorXd spectral_function() const;
  // background after removing g^2/(w - lambda_c)
  Eigen::VectorXd spectral_function_subtracted(cdouble lambda_c, cdouble g2) const;
};

// Sigma(w) = H_TA (w I - H_AA)^{-1} H_AT by a dense solve per grid point
// (one refinement step; retries at w + 1e-9 on an exactly singular shift).
SpectrumCurve self_energy(const BlockHamiltonian& blocks,
                          const Eigen::VectorXd& omega_grid, int threads = 0);

// Single-point evaluation, same contract.
cdouble self_energy_at(const BlockHamiltonian& blocks, double omega);

struct Gamma3dResult {
  double value = 0.0;
  bool unreliable = false;
};

// gamma_a - 2 Im[Sigma(w) - g^2/(w - lambda_c)] at w = omega. The smoothness
// of the subtracted background is probed by a second difference at scale
// Gamma0/20; negative or non-smooth values are flagged, never clamped.
Gamma3dResult gamma_3d(const BlockHamiltonian& blocks, cdouble lambda_c,
                       cdouble g2, double gamma_a, double omega,
                       double smoothness_scale = 0.05);

// Dense grid (spacing <= kappa/10 within 5 kappa of each listed resonance)
// over [omega_min, omega_max] with the given base spacing elsewhere.
Eigen::VectorXd make_spectral_grid(double omega_min, double omega_max,
                                   double coarse_step,
                                   const std::vector<cdouble>& resonances);

// Amplitude that the excitation remains on the (single) target atom,
// computed two ways and cross-asserted pointwise to `tolerance`:
//   (i) adaptive integration of the single-excitation amplitude equations,
//  (ii) Filon inverse Fourier transform of the resolvent, with the free-atom
//       part handled analytically.
struct ExcitedAmplitude {
  Eigen::VectorXd t;
  Eigen::VectorXcd ode;
  Eigen::VectorXcd resolvent;
  double max_disagreement = 0.0;
};

ExcitedAmplitude excited_amplitude(const BlockHamiltonian& blocks,
                                   const Eigen::VectorXd& t_grid,
                                   double tolerance = 1e-4, int threads = 0);

void write_spectrum_csv(const std::string& path, const SpectrumCurve& curve,
                        cdouble lambda_c, cdouble g2);

}  // namespace arraycav
