#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arraycav/analytic.hpp"
#include "arraycav/config.hpp"
#include "arraycav/dynamics.hpp"
#include "arraycav/extract.hpp"
#include "arraycav/motion.hpp"
#include "arraycav/scattering.hpp"
#include "arraycav/spectral.hpp"

namespace arraycav {

// Shared experiment pipelines used by the CLI subcommands and the
// acceptance suite.

DipoleSet layout_from_config(const GeometryConfig& geometry,
                             const std::vector<TargetSettings>& targets,
                             double omega_c_hint = 0.0);

// Cavity characterization: modes of the array block, coupling to the first
// target, identified fundamental mode, gamma_3d.
struct CavityCharacterization {
  BlockHamiltonian blocks;
  EigenmodeSet modes;
  Eigen::VectorXcd g2;  // per-mode coupling of the probe target
  int fundamental = -1;
  CavityParams params;
};

CavityCharacterization characterize_cavity(const DipoleSet& layout,
                                           std::optional<double> fast_sigma = {},
                                           int probe_target = 0, int threads = 0);

// Exchange (or single-atom) transfer experiment with a matched, two-photon
// retuned Raman drive.
struct TransferSettings {
  double delta2 = 500.0;                // in units of gamma_a
  std::optional<double> rabi;           // absent = matched to kappa/gamma_3d
  std::optional<double> delta1;         // absent = delta2 with exact retune
  int n_times = 1200;
  double horizon = 1.5;                 // multiples of the transfer time
  Propagator method = Propagator::EigenBasis;
};

struct TransferResult {
  CavityParams params;
  RamanEffective effective;
  RamanConfig raman;
  Trajectory trajectory;
  double fidelity = 0.0;
  double prediction = 0.0;
  double transfer_time = 0.0;
};

// cavity must carry one target (single transfer) or two (exchange).
TransferResult run_transfer_experiment(const DipoleSet& cavity,
                                       const TransferSettings& settings = {},
                                       int threads = 0);

// Exact two-photon retune on the assembled Lambda system: shifts the common
// |g2> level so the dark level sits at the center of the bright doublet
// (single target: so the two dressed levels carry equal g2 weight).
struct RetuneReport {
  int passes = 0;
  double applied_shift = 0.0;
  bool converged = false;
};
RetuneReport retune_two_photon(LambdaSystem& system, int max_passes = 3);

// Transmission spectrum around a predicted resonance with automatic grid.
struct TransmissionScan {
  CavitySpectrum spectrum;
  double peak_omega = 0.0;
  double peak_value = 0.0;
  double width = 0.0;  // FWHM from the sampled curve
};

TransmissionScan scan_transmission(const DipoleSet& cavity,
                                   const GaussianBeam& beam, double center,
                                   double half_window, double resolve_width,
                                   int threads = 0);

// Gaussian fit of |v| on the z>0 mirror; returns the inferred waist w0 from
// w(L/2)^2 = w0^2 + (L / (k0 w0))^2.
struct WaistFit {
  double w_mirror = 0.0;  // fitted w(L/2)
  double w0 = 0.0;
  bool valid = false;
};
WaistFit fit_mode_waist(const Eigen::VectorXcd& mode, const DipoleSet& layout);

}  // namespace arraycav
