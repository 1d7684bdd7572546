#pragma once

#include <Eigen/Dense>
#include <vector>

#include "arraycav/interaction.hpp"
#include "arraycav/modes.hpp"

namespace arraycav {

struct RamanConfig {
  double rabi = 0.0;     // Omega, classical drive
  double delta1 = 0.0;   // cavity <-> |g1>-|e> transition detuning
  double delta2 = 0.0;   // drive  <-> |g2>-|e> transition detuning
};

// Exact second-order coefficients of the adiabatically eliminated Lambda
// system: g_eff = g Omega / (Delta1 + Delta2), gamma_eff = Omega^2 gamma_3d /
// (Delta1 + Delta2)^2, plus the Stark shifts needed to re-tune the two-photon
// resonance.
struct RamanEffective {
  double g_eff = 0.0;
  double gamma_eff = 0.0;
  double stark_g2 = 0.0;      // Omega^2 / (2 (Delta1 + Delta2)), shift of |g2>
  double stark_cavity = 0.0;  // 2 g^2 / (Delta1 + Delta2), shift of |g1, 1>
  double epsilon = 0.0;       // Omega / (Delta1 + Delta2)
};

RamanEffective raman_effective(const RamanConfig& config, double g,
                               double gamma_3d, double kappa,
                               Warnings* warnings = nullptr);

// Omega for which gamma_eff = kappa exactly (rate matching).
double matched_drive_rabi(double kappa, double gamma_3d, double delta1,
                          double delta2);

// Single-excitation model of the cavity plus Lambda targets. Basis: array
// excitations, then per-target (|e>, |g2>).
struct LambdaSystem {
  Eigen::MatrixXcd matrix;
  int n_array = 0;
  int n_target = 0;
  int e_index(int m) const { return n_array + 2 * m; }
  int g2_index(int m) const { return n_array + 2 * m + 1; }
  int dim() const { return n_array + 2 * n_target; }
};

// blocks must hold the targets' |g1>-|e> transitions with e-state detunings
// already set (omega_c + Delta1). g2_detuning defaults to
// delta_e - Delta2 per target when empty.
LambdaSystem make_lambda_system(const BlockHamiltonian& blocks,
                                const std::vector<RamanConfig>& raman,
                                std::vector<double> g2_detuning = {});

// Exact two-photon retuning: shifts each target's |g2> level so that the
// dressed |g2> energy matches the dressed cavity energy (cancels the Stark
// terms to all orders in the 2x2 subblocks).
std::vector<double> tuned_g2_detunings(const BlockHamiltonian& blocks,
                                       const std::vector<RamanConfig>& raman,
                                       cdouble lambda_c,
                                       const Eigen::VectorXcd& per_target_g,
                                       double gamma_3d);

enum class Propagator { EigenBasis, Rk45 };

struct Trajectory {
  Eigen::VectorXd t;
  Eigen::MatrixXd pop_g2;      // per-target |g2> population
  Eigen::MatrixXd pop_e;       // per-target |e> population
  Eigen::MatrixXcd amp_g2;     // per-target |g2> amplitude
  Eigen::VectorXd pop_cavity;  // |projection of array block on cavity mode|^2
  Eigen::VectorXd pop_array;   // total array population
  Eigen::VectorXd norm;        // <psi|psi>
};

// Evolves psi0 under the (time-independent) non-Hermitian LambdaSystem.
// EigenBasis propagates exactly through the eigendecomposition; Rk45 is the
// adaptive direct integration (local error < tol).
Trajectory evolve(const LambdaSystem& system, const Eigen::VectorXcd& psi0,
                  const Eigen::VectorXd& t_grid,
                  const Eigen::VectorXcd& cavity_vector,
                  Propagator method = Propagator::EigenBasis, double tol = 1e-9);

// Max over time of the receiving target's |g2> population.
double transfer_fidelity(const Trajectory& trajectory, int receiving_target);
// Max over time of the cavity-mode population (single-atom transfer).
double cavity_transfer_fidelity(const Trajectory& trajectory);

enum class TransferMode { Single, Exchange };

// exp(-pi / sqrt(C)) or exp(-pi sqrt(2 / C)).
double fidelity_prediction(double cooperativity, TransferMode mode);

void write_trajectory_csv(const std::string& path, const Trajectory& t);

}  // namespace arraycav
