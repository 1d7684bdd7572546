#include "arraycav/dynamics.hpp"

#include <cmath>
#include <cstdio>

#include "arraycav/integrate.hpp"
#include "arraycav/linalg.hpp"

namespace arraycav {

RamanEffective raman_effective(const RamanConfig& config, double g,
                               double gamma_3d, double kappa, Warnings* warnings) {
  const double dsum = config.delta1 + config.delta2;
  if (dsum == 0.0)
    throw std::invalid_argument("raman_effective: Delta1 + Delta2 must be nonzero");
  RamanEffective eff;
  eff.epsilon = config.rabi / dsum;
  eff.g_eff = g * config.rabi / dsum;
  eff.gamma_eff = config.rabi * config.rabi * gamma_3d / (dsum * dsum);
  eff.stark_g2 = 0.5 * config.rabi * config.rabi / dsum;
  eff.stark_cavity = 2.0 * g * g / dsum;
  if (std::min(std::abs(config.delta1), std::abs(config.delta2)) <
      10.0 * std::max({config.rabi, g, gamma_3d}))
    warn(warnings, "raman_effective: adiabatic elimination marginal, "
                   "|Delta| < 10 max(Omega, g, gamma_3d)");
  if (gamma_3d > 0.0 && kappa > 0.0) {
    const double coop = 4.0 * g * g / (kappa * gamma_3d);
    if (std::abs(config.delta1) < std::sqrt(std::max(coop, 0.0)) * gamma_3d)
      warn(warnings,
           "raman_effective: |Delta1| below sqrt(C) gamma_3d, Raman-induced "
           "decoherence not suppressed");
  }
  return eff;
}

double matched_drive_rabi(double kappa, double gamma_3d, double delta1,
                          double delta2) {
  if (!(kappa > 0.0 && gamma_3d > 0.0))
    throw std::invalid_argument("matched_drive_rabi: rates must be positive");
  return (delta1 + delta2) * std::sqrt(kappa / gamma_3d);
}

LambdaSystem make_lambda_system(const BlockHamiltonian& blocks,
                                const std::vector<RamanConfig>& raman,
                                std::vector<double> g2_detuning) {
  const int nt = blocks.n_target;
  if (static_cast<int>(raman.size()) != nt)
    throw std::invalid_argument("make_lambda_system: one RamanConfig per target");
  if (g2_detuning.empty()) {
    g2_detuning.resize(nt);
    for (int m = 0; m < nt; ++m)
      g2_detuning[m] = blocks.tt()(m, m).real() - raman[m].delta2;
  }
  if (static_cast<int>(g2_detuning.size()) != nt)
    throw std::invalid_argument("make_lambda_system: g2_detuning size mismatch");

  LambdaSystem sys;
  sys.n_array = blocks.n_array;
  sys.n_target = nt;
  const int dim = sys.dim();
  sys.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  sys.matrix.topLeftCorner(blocks.n_array, blocks.n_array) = blocks.aa();
  for (int m = 0; m < nt; ++m) {
    const int e = sys.e_index(m);
    const int g2 = sys.g2_index(m);
    sys.matrix.col(e).head(blocks.n_array) = blocks.at().col(m);
    sys.matrix.row(e).head(blocks.n_array) = blocks.ta().row(m);
    sys.matrix(e, e) = blocks.tt()(m, m);
    for (int m2 = 0; m2 < nt; ++m2)
      if (m2 != m) sys.matrix(e, sys.e_index(m2)) = blocks.tt()(m, m2);
    sys.matrix(e, g2) = 0.5 * raman[m].rabi;
    sys.matrix(g2, e) = 0.5 * raman[m].rabi;
    sys.matrix(g2, g2) = g2_detuning[m];
  }
  return sys;
}

std::vector<double> tuned_g2_detunings(const BlockHamiltonian& blocks,
                                       const std::vector<RamanConfig>& raman,
                                       cdouble lambda_c,
                                       const Eigen::VectorXcd& per_target_g,
                                       double gamma_3d) {
  const int nt = blocks.n_target;
  std::vector<double> out(nt);
  for (int m = 0; m < nt; ++m) {
    const cdouble delta_e = blocks.tt()(m, m);  // includes -i gamma_a / 2
    const double g = std::abs(per_target_g[m]);
    (void)gamma_3d;
    // dressed cavity branch of [[lambda_c, g], [g, delta_e]]
    auto dressed = [](cdouble h11, cdouble h22, double coupling,
                      bool branch_first) {
      cdouble avg = 0.5 * (h11 + h22);
      cdouble half = 0.5 * (h11 - h22);
      cdouble root = std::sqrt(half * half + coupling * coupling);
      // pick the branch adiabatically connected to h11 (or h22)
      cdouble e1 = avg + root, e2 = avg - root;
      bool first_is_h11 = std::abs(e1 - h11) <= std::abs(e2 - h11);
      if (branch_first) return first_is_h11 ? e1 : e2;
      return first_is_h11 ? e2 : e1;
    };
    const double target_energy =
        dressed(lambda_c, delta_e, g, true).real();
    // solve Re E_g2(dg2) = target_energy by fixed-point iteration
    double dg2 = delta_e.real() - raman[m].delta2;
    for (int it = 0; it < 60; ++it) {
      cdouble e_g2 =
          dressed(cdouble(dg2, 0.0), delta_e, 0.5 * raman[m].rabi, true);
      double mismatch = target_energy - e_g2.real();
      dg2 += mismatch;
      if (std::abs(mismatch) < 1e-12) break;
    }
    out[m] = dg2;
  }
  return out;
}

namespace {

void fill_populations(const LambdaSystem& sys, const Eigen::VectorXcd& psi,
                      const Eigen::VectorXcd& cavity_vector, Eigen::Index i,
                      Trajectory& traj) {
  for (int m = 0; m < sys.n_target; ++m) {
    traj.pop_e(i, m) = std::norm(psi[sys.e_index(m)]);
    traj.pop_g2(i, m) = std::norm(psi[sys.g2_index(m)]);
    traj.amp_g2(i, m) = psi[sys.g2_index(m)];
  }
  const auto array_part = psi.head(sys.n_array);
  traj.pop_array[i] = array_part.squaredNorm();
  if (cavity_vector.size() == sys.n_array) {
    const double v2 = cavity_vector.squaredNorm();
    traj.pop_cavity[i] = std::norm(cavity_vector.dot(array_part)) / v2;
  }
  traj.norm[i] = psi.squaredNorm();
}

}  // namespace

Trajectory evolve(const LambdaSystem& sys, const Eigen::VectorXcd& psi0,
                  const Eigen::VectorXd& t_grid,
                  const Eigen::VectorXcd& cavity_vector, Propagator method,
                  double tol) {
  if (psi0.size() != sys.dim())
    throw std::invalid_argument("evolve: psi0 dimension mismatch");
  Trajectory traj;
  traj.t = t_grid;
  traj.pop_g2.resize(t_grid.size(), sys.n_target);
  traj.pop_e.resize(t_grid.size(), sys.n_target);
  traj.amp_g2.resize(t_grid.size(), sys.n_target);
  traj.pop_cavity = Eigen::VectorXd::Zero(t_grid.size());
  traj.pop_array.resize(t_grid.size());
  traj.norm.resize(t_grid.size());

  if (method == Propagator::Rk45) {
    integrate_dopri5(
        [&](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) {
          dydt.noalias() = cdouble(0.0, -1.0) * (sys.matrix * y);
        },
        psi0, 0.0, std::span<const double>(t_grid.data(), t_grid.size()),
        [&](std::size_t i, const Eigen::VectorXcd& y) {
          fill_populations(sys, y, cavity_vector, static_cast<Eigen::Index>(i),
                           traj);
        },
        tol);
    return traj;
  }

  // exact propagation through the eigenbasis of the time-independent matrix
  EigResult eig = eig_dense(sys.matrix);
  Eigen::VectorXcd coeffs = solve_checked(eig.vectors, psi0);
  double reconstruction = (eig.vectors * coeffs - psi0).norm();
  if (reconstruction > 1e-8)
    throw numerical_failure("evolve: ill-conditioned eigenbasis, |Vc - psi0| = " +
                            std::to_string(reconstruction));
  Eigen::VectorXcd phase(eig.values.size()), psi(sys.dim());
  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    for (Eigen::Index m = 0; m < eig.values.size(); ++m)
      phase[m] = coeffs[m] * std::exp(cdouble(0.0, -1.0) * eig.values[m] * t);
    psi.noalias() = eig.vectors * phase;
    fill_populations(sys, psi, cavity_vector, i, traj);
  }
  return traj;
}

namespace {

double peak_of(const Eigen::VectorXd& t, const Eigen::VectorXd& y) {
  Eigen::Index best = 0;
  y.maxCoeff(&best);
  if (best == 0 || best == y.size() - 1) return y[best];
  // quadratic refinement around the discrete maximum
  const double y0 = y[best - 1], y1 = y[best], y2 = y[best + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom >= 0.0) return y1;
  const double delta = 0.5 * (y0 - y2) / denom;
  (void)t;
  return y1 - 0.25 * (y0 - y2) * delta;
}

}  // namespace

double transfer_fidelity(const Trajectory& trajectory, int receiving_target) {
  if (receiving_target < 0 || receiving_target >= trajectory.pop_g2.cols())
    throw std::invalid_argument("transfer_fidelity: bad target index");
  return peak_of(trajectory.t, trajectory.pop_g2.col(receiving_target));
}

double cavity_transfer_fidelity(const Trajectory& trajectory) {
  return peak_of(trajectory.t, trajectory.pop_cavity);
}

double fidelity_prediction(double cooperativity, TransferMode mode) {
  if (!(cooperativity > 0.0))
    throw std::domain_error("fidelity_prediction: C must be positive");
  switch (mode) {
    case TransferMode::Single:
      return std::exp(-pi / std::sqrt(cooperativity));
    case TransferMode::Exchange:
      return std::exp(-pi * std::sqrt(2.0 / cooperativity));
  }
  throw std::invalid_argument("fidelity_prediction: unknown mode");
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  std::fprintf(f, "t");
  for (int m = 0; m < traj.pop_g2.cols(); ++m)
    std::fprintf(f, ",pop_g2_%d,pop_e_%d", m, m);
  std::fprintf(f, ",pop_cavity,pop_array,norm\n");
  for (Eigen::Index i = 0; i < traj.t.size(); ++i) {
    std::fprintf(f, "%.17g", traj.t[i]);
    for (int m = 0; m < traj.pop_g2.cols(); ++m)
      std::fprintf(f, ",%.17g,%.17g", traj.pop_g2(i, m), traj.pop_e(i, m));
    std::fprintf(f, ",%.17g,%.17g,%.17g\n", traj.pop_cavity[i], traj.pop_array[i],
                 traj.norm[i]);
  }
  std::fclose(f);
}

}  // namespace arraycav
