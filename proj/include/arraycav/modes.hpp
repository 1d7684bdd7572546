#pragma once

#include <Eigen/Dense>
#include <string>

#include "arraycav/interaction.hpp"

namespace arraycav {

// Biorthogonal eigenpairs of a complex-symmetric block. Right vectors are
// normalized to v^T v = 1; left vectors are the transposed right vectors.
struct EigenmodeSet {
  Eigen::VectorXcd eigenvalues;  // lambda_n = omega_n - i kappa_n / 2
  Eigen::MatrixXcd right;        // columns v_R

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double omega(int n) const { return eigenvalues[n].real(); }
  double kappa(int n) const { return -2.0 * eigenvalues[n].imag(); }
};

EigenmodeSet eigenmodes(const Eigen::MatrixXcd& h_aa);

// g_n^2 = (h_ta . v_R,n)(v_L,n . h_at) for every mode.
Eigen::VectorXcd couple_strengths(const EigenmodeSet& modes,
                                  const Eigen::VectorXcd& h_ta,
                                  const Eigen::VectorXcd& h_at);

// argmax of Re(g^2)/kappa; near-ties resolved toward smaller kappa.
int identify_cavity_mode(const EigenmodeSet& modes, const Eigen::VectorXcd& g2);

// Target-free identification: maximal normalized overlap with the Gaussian
// mode evaluated on the mirror atoms.
int identify_fundamental_by_overlap(const EigenmodeSet& modes,
                                    const DipoleSet& layout,
                                    const GaussianBeam& beam);

// delta_mn = (Gamma0/2) tan[(m+n) arccos(1 - L/R)].
double mode_splitting(double gamma0_collective, double L, double r_curvature,
                      int order);

struct CavityParams {
  double g = 0.0;
  double kappa = 0.0;
  double omega_c = 0.0;
  double gamma_3d = 0.0;
  double cooperativity = 0.0;  // 4 g^2 / (kappa gamma_3d)
  int mode_index = -1;
  cdouble g2{};                // complex coupling, g = sqrt(Re g2)
  bool gamma_3d_unreliable = false;
};

CavityParams make_cavity_params(cdouble lambda_c, cdouble g2, double gamma_3d,
                                int mode_index, bool gamma_unreliable = false);

// Per-mode CSV (re_lambda, im_lambda, re_g2, im_g2, g2_over_kappa) sorted by
// g^2/kappa descending.
void write_modes_csv(const std::string& path, const EigenmodeSet& modes,
                     const Eigen::VectorXcd& g2);

}  // namespace arraycav
