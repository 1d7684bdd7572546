#pragma once

#include <Eigen/Dense>
#include <functional>

#include "arraycav/interaction.hpp"

namespace arraycav {

struct ScatterCoefficients {
  cdouble r{};
  cdouble t{};
  double reflection() const { return std::norm(r); }
  double transmission() const { return std::norm(t); }
  double scattering_loss() const { return 1.0 - reflection() - transmission(); }
};

// Plane-wave response of an infinite array: r = (i Gamma/2) /
// (-delta + Delta_k - i Gamma/2), t = 1 + r; delta = omega_L - omega_0.
ScatterCoefficients infinite_mirror_response(double delta, double gamma_k,
                                             double delta_k);

// Weak-drive steady state sigma = h^{-1} Omega at laser detuning omega_L
// (h carries -omega_L on the diagonal). One refinement step; residual
// beyond 1e-10 raises numerical_failure.
Eigen::VectorXcd steady_state(const BlockHamiltonian& blocks,
                              const Eigen::VectorXcd& drive, double omega_l);

// Input-output field: E(r) = E0(r) + (3 pi / k0) sum_i G(r, r_i) e_i
// sqrt(gamma_i) sigma_i.
Eigen::Vector3cd scattered_field(
    const Eigen::VectorXcd& amplitudes, const DipoleSet& layout,
    const Eigen::Vector3d& r,
    const std::function<Eigen::Vector3cd(const Eigen::Vector3d&)>& incident = {});

// Projection of the total field onto the matched Gaussian detection mode on
// planes z = -(L/2 + 5) (transmission; the beam convention propagates toward
// -z) and z = +(L/2 + 5) (reflection, retro mode). Projection weights come
// from a tensor trapezoid over a (6 w(z))^2 window with grid-halving control.
class ModeProjector {
 public:
  ModeProjector(const DipoleSet& layout, const GaussianBeam& beam,
                double plane_offset = 5.0, double tolerance = 1e-6,
                int threads = 0);

  // r/t amplitudes for the steady state `amplitudes` under a unit-amplitude
  // matched-beam drive.
  ScatterCoefficients project(const Eigen::VectorXcd& amplitudes) const;
  double quadrature_error() const { return quadrature_error_; }

 private:
  Eigen::VectorXcd weights_t_;  // per-atom transmitted-mode projections
  Eigen::VectorXcd weights_r_;  // per-atom retro-mode projections
  cdouble incident_overlap_{};
  double quadrature_error_ = 0.0;
};

// Single-mirror R/T/S for a matched beam at laser detuning `delta`.
ScatterCoefficients mirror_coefficients(const DipoleSet& mirror,
                                        const GaussianBeam& beam, double delta,
                                        int threads = 0);

struct CavitySpectrum {
  Eigen::VectorXd omega;
  Eigen::VectorXd transmission, reflection, loss;
};

CavitySpectrum cavity_transmission_spectrum(const DipoleSet& cavity,
                                            const GaussianBeam& beam,
                                            const Eigen::VectorXd& omega_grid,
                                            int threads = 0);

// T_cav(w) = | t(w)^2 / (1 - r(w)^2 e^{i phi}) |^2 with phi = 2 k0 L (1 + w/Q);
// all dispersion is carried by r(w), t(w).
using AmplitudeResponse = std::function<cdouble(double)>;
Eigen::VectorXd fabry_perot(const AmplitudeResponse& r_fn,
                            const AmplitudeResponse& t_fn, double length,
                            const Eigen::VectorXd& omega_grid,
                            double quality_factor = default_quality_factor);

// Azimuthally averaged far-field intensity of a mode at radius 1e4 lambda0,
// polar angle theta measured from the -z (transmission) axis.
Eigen::VectorXd far_field_pattern(const Eigen::VectorXcd& mode_amplitudes,
                                  const DipoleSet& layout,
                                  const Eigen::VectorXd& theta_grid,
                                  int n_azimuthal = 32, double radius = 1e4);

}  // namespace arraycav
