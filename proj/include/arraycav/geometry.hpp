#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arraycav/common.hpp"

namespace arraycav {

// One point dipole: position [lambda0], unit polarization, detuning from the
// array resonance [gamma0] (includes any Stark shift), linewidth [gamma0].
struct Dipole {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3cd orientation = Eigen::Vector3cd(1.0, 0.0, 0.0);
  double detuning = 0.0;
  double linewidth = 1.0;

  void validate() const;
};

// Full emitter layout. Array atoms are ordered mirror 1 (z<0) row-major,
// then mirror 2 (z>0) row-major; targets follow all array atoms.
struct DipoleSet {
  std::vector<Dipole> array_atoms;
  std::vector<Dipole> target_atoms;

  double a = 0.0;               // lattice constant
  int n_side = 0;               // N per mirror
  double length = 0.0;          // mirror separation L
  std::optional<double> waist;  // design w0; absent for flat mirrors

  int n_array() const { return static_cast<int>(array_atoms.size()); }
  int n_target() const { return static_cast<int>(target_atoms.size()); }
  int total() const { return n_array() + n_target(); }
  const Dipole& atom(int i) const {
    return i < n_array() ? array_atoms[i] : target_atoms[i - n_array()];
  }

  // Checks per-dipole invariants and the minimum pairwise distance.
  void validate() const;
};

struct GaussianBeam {
  double waist = 1.0;  // w0
  Eigen::Vector3d polarization = Eigen::Vector3d(1.0, 0.0, 0.0);

  double rayleigh_range() const { return 0.5 * k0 * waist * waist; }
  double width(double z) const {
    double zr = rayleigh_range();
    return waist * std::sqrt(1.0 + (z / zr) * (z / zr));
  }
  double gouy_phase(double z) const { return std::atan(z / rayleigh_range()); }
  // 1/R(z); finite everywhere including the focal plane
  double inverse_curvature(double z) const {
    double zr = rayleigh_range();
    return z / (z * z + zr * zr);
  }
};

// Paraxial fundamental mode, unit transverse normalization at every z:
//   E(r) = pol * sqrt(2/pi)/w(z) exp(-rho^2/w^2)
//              * exp[-i (k0 z + k0 rho^2/(2R(z)) - psi(z))].
Eigen::Vector3cd gaussian_mode_field(const GaussianBeam& beam,
                                     const Eigen::Vector3d& r);

// N x N square grid at z = z_plane, centered on the z axis, detuning 0,
// linewidth 1, row-major order.
std::vector<Dipole> build_square_array(int n, double a, double z_plane,
                                       const Eigen::Vector3cd& orientation);

// Displaces each atom of a flat mirror at z = +-L/2 along z to the root of
// the Gaussian phase-matching condition
//   k0 z + k0 (x^2+y^2)/(2R(z)) - psi(z) = k0 L/2
// (sign-mirrored for z<0). x, y are never touched.
std::vector<Dipole> curve_mirror(std::vector<Dipole> flat, double w0, double L);

// Adds alpha (1 - exp(-2 r^2 / w_stark^2)) to each detuning, r = in-plane
// radius. Positions unchanged.
std::vector<Dipole> stark_detuning_profile(std::vector<Dipole> flat,
                                           double alpha, double w_stark);

// Independent per-axis Gaussian position noise; deterministic for a fixed
// seed. Targets are displaced too unless displace_targets = false.
DipoleSet sample_frozen_disorder(const DipoleSet& ideal,
                                 const Eigen::Vector3d& sigma, std::uint64_t seed,
                                 bool displace_targets = true);

struct StarkProfile {
  double alpha = 0.0;
  double w_stark = 1.0;
};

// Two mirrors at +-L/2 (curved to w0 when given, optionally Stark-shifted)
// plus target atoms.
DipoleSet make_cavity(int n, double a, double L, std::optional<double> w0,
                      std::vector<Dipole> targets,
                      std::optional<StarkProfile> stark = {},
                      const Eigen::Vector3cd& orientation =
                          Eigen::Vector3cd(1.0, 0.0, 0.0));

// The z>0 mirror of the corresponding cavity, standalone. L = 0 places a
// flat mirror at the origin.
DipoleSet make_single_mirror(int n, double a, double L,
                             std::optional<double> w0,
                             const Eigen::Vector3cd& orientation =
                                 Eigen::Vector3cd(1.0, 0.0, 0.0));

Dipole make_target(const Eigen::Vector3d& position, double gamma_a,
                   double detuning = 0.0,
                   const Eigen::Vector3cd& orientation =
                       Eigen::Vector3cd(1.0, 0.0, 0.0));

void write_layout_csv(const std::string& path, const DipoleSet& layout);

}  // namespace arraycav
