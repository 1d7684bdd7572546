#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "arraycav/geometry.hpp"

namespace arraycav {

// Free-space dyadic Green's function at the array wavenumber [1/lambda0].
Eigen::Matrix3cd greens_dyadic(const Eigen::Vector3d& r);

// Delta_ij - i Gamma_ij / 2 = -(3 pi / k0) sqrt(gamma_i gamma_j)
//                             e_i^* . G(r_i - r_j) . e_j   [gamma0]
cdouble coupling_coefficient(const Dipole& di, const Dipole& dj);

// Effective non-Hermitian Hamiltonian, array block first, then targets.
// Diagonal: detuning_i - i linewidth_i / 2. Off-diagonal: coupling
// coefficients, multiplied by exp(-k0^2 sigma^2) in the fast-motion variant.
struct BlockHamiltonian {
  Eigen::MatrixXcd full;
  int n_array = 0;
  int n_target = 0;
  double motion_sigma = 0.0;
  double drive_rescale = 1.0;  // exp(-k0^2 sigma^2 / 2)

  auto aa() const { return full.topLeftCorner(n_array, n_array); }
  auto at() const { return full.topRightCorner(n_array, n_target); }
  auto ta() const { return full.bottomLeftCorner(n_target, n_array); }
  auto tt() const { return full.bottomRightCorner(n_target, n_target); }

  // Array-target coupling column / target-array row for one target.
  Eigen::VectorXcd h_at(int target = 0) const { return at().col(target); }
  Eigen::VectorXcd h_ta(int target = 0) const {
    return ta().row(target).transpose();
  }
};

BlockHamiltonian assemble_hamiltonian(const DipoleSet& layout,
                                      std::optional<double> fast_motion_sigma = {},
                                      int threads = 0);

// Omega_i = amplitude * rescale * sqrt(gamma_i) e_i^* . E(r_i); the sqrt
// weight is the transition dipole magnitude in gamma0 units. Pass the
// Hamiltonian's drive_rescale when it was assembled with fast motion.
Eigen::VectorXcd drive_vector(const DipoleSet& layout, const GaussianBeam& beam,
                              cdouble amplitude, double rescale = 1.0);

// Binary dump: 8 little-endian 64-bit header fields (magic, version,
// n_array, n_target, a, L, w0, sigma) followed by the full matrix row-major
// as complex64 (float32 re/im pairs).
void write_hamiltonian_dump(const std::string& path, const BlockHamiltonian& h,
                            const DipoleSet& layout);
BlockHamiltonian read_hamiltonian_dump(const std::string& path);

}  // namespace arraycav
