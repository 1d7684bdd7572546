#include "arraycav/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "arraycav/integrate.hpp"
#include "arraycav/linalg.hpp"
#include "arraycav/parallel.hpp"

namespace arraycav {

Eigen::VectorXd SpectrumCurve::spectral_function() const {
  return gamma_a - 2.0 * sigma.imag().array();
}

Eigen::VectorXd SpectrumCurve::spectral_function_subtracted(cdouble lambda_c,
                                                            cdouble g2) const {
  Eigen::VectorXd a(omega.size());
  for (Eigen::Index i = 0; i < omega.size(); ++i) {
    cdouble background = sigma[i] - g2 / (omega[i] - lambda_c);
    a[i] = gamma_a - 2.0 * background.imag();
  }
  return a;
}

namespace {

cdouble sigma_solve(const Eigen::MatrixXcd& h_aa, const Eigen::VectorXcd& h_ta,
                    const Eigen::VectorXcd& h_at, double omega) {
  Eigen::MatrixXcd shifted = -h_aa;
  shifted.diagonal().array() += omega;
  double backward = 0.0;
  Eigen::VectorXcd x;
  try {
    x = solve_checked(shifted, h_at, &backward);
  } catch (const numerical_failure&) {
    backward = 1.0;
  }
  if (backward > 1e-10) {
    // exactly singular shift (measure zero); retry slightly off
    shifted.diagonal().array() += 1e-9;
    x = solve_checked(shifted, h_at, &backward);
    if (backward > 1e-10)
      throw numerical_failure("self_energy: solve residual " +
                              std::to_string(backward) + " at omega=" +
                              std::to_string(omega));
  }
  return (h_ta.transpose() * x)(0, 0);
}

}  // namespace

cdouble self_energy_at(const BlockHamiltonian& blocks, double omega) {
  if (blocks.n_target != 1)
    throw std::invalid_argument("self_energy: exactly one target atom required");
  if (blocks.n_array == 0) return 0.0;
  return sigma_solve(blocks.aa(), blocks.h_ta(), blocks.h_at(), omega);
}

SpectrumCurve self_energy(const BlockHamiltonian& blocks,
                          const Eigen::VectorXd& omega_grid, int threads) {
  if (blocks.n_target != 1)
    throw std::invalid_argument("self_energy: exactly one target atom required");
  SpectrumCurve curve;
  curve.omega = omega_grid;
  curve.sigma.resize(omega_grid.size());
  curve.gamma_a = -2.0 * blocks.tt()(0, 0).imag();
  if (blocks.n_array == 0) {
    curve.sigma.setZero();
    return curve;
  }
  const Eigen::MatrixXcd h_aa = blocks.aa();
  const Eigen::VectorXcd h_ta = blocks.h_ta();
  const Eigen::VectorXcd h_at = blocks.h_at();
  parallel_for(
      static_cast<std::size_t>(omega_grid.size()),
      [&](std::size_t i) {
        curve.sigma[i] = sigma_solve(h_aa, h_ta, h_at, omega_grid[i]);
      },
      threads);
  return curve;
}

Gamma3dResult gamma_3d(const BlockHamiltonian& blocks, cdouble lambda_c,
                       cdouble g2, double gamma_a, double omega,
                       double smoothness_scale) {
  auto background = [&](double w) {
    cdouble sigma = self_energy_at(blocks, w);
    return gamma_a - 2.0 * (sigma - g2 / (w - lambda_c)).imag();
  };
  Gamma3dResult out;
  out.value = background(omega);
  // non-smooth background indicates unsubtracted nearby modes
  const double h = smoothness_scale;
  double second_difference =
      background(omega - h) - 2.0 * out.value + background(omega + h);
  if (std::abs(second_difference) > 0.25 * std::max(gamma_a, std::abs(out.value)))
    out.unreliable = true;
  if (out.value < 0.0) out.unreliable = true;
  return out;
}

Eigen::VectorXd make_spectral_grid(double omega_min, double omega_max,
                                   double coarse_step,
                                   const std::vector<cdouble>& resonances) {
  if (!(omega_max > omega_min) || !(coarse_step > 0))
    throw std::invalid_argument("make_spectral_grid: bad range");
  std::set<double> grid;
  for (double w = omega_min; w < omega_max; w += coarse_step) grid.insert(w);
  grid.insert(omega_max);
  for (cdouble lambda : resonances) {
    const double wc = lambda.real();
    const double kappa = std::max(-2.0 * lambda.imag(), 1e-9);
    const double step = kappa / 10.0;
    for (double w = wc - 5.0 * kappa; w <= wc + 5.0 * kappa + 0.5 * step;
         w += step) {
      if (w >= omega_min && w <= omega_max) grid.insert(w);
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  Eigen::Index i = 0;
  for (double w : grid) out[i++] = w;
  return out;
}

namespace {

// Non-uniform frequency grid for the resolvent inversion: coarse background
// plus geometric refinement around the narrow resolvent features. Broad
// (superradiant) poles are already smooth on the coarse grid.
std::vector<double> resolvent_grid(const Eigen::VectorXcd& poles,
                                   double tail_weight, int level) {
  double lo = poles.real().minCoeff(), hi = poles.real().maxCoeff();
  // window wide enough that the truncated 1/w^3 tail stays below ~1e-6
  double window = std::max({50.0, 3.0 * (hi - lo),
                            std::sqrt(tail_weight / (2.0 * pi * 1e-7))});
  lo -= window;
  hi += window;
  const double refine = std::pow(2.0, level);
  std::set<double> grid;
  const int n_coarse = static_cast<int>(600 * refine);
  const double coarse_step = (hi - lo) / n_coarse;
  for (int i = 0; i <= n_coarse; ++i) grid.insert(lo + coarse_step * i);

  // merge features that overlap within a quarter width
  std::vector<std::pair<double, double>> features;  // (center, width)
  for (Eigen::Index p = 0; p < poles.size(); ++p) {
    const double width = std::max(2.0 * std::abs(poles[p].imag()), 1e-7);
    if (width > 4.0 * coarse_step) continue;  // resolved already
    features.emplace_back(poles[p].real(), width);
  }
  std::sort(features.begin(), features.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& f : features) {
    if (!merged.empty() && f.first - merged.back().first <
                               0.25 * std::max(f.second, merged.back().second))
      merged.back().second = std::max(merged.back().second, f.second);
    else
      merged.push_back(f);
  }
  for (const auto& [wc, width] : merged) {
    const double step = width / (14.0 * refine);
    const double span = std::min(40.0 * width, 8.0 * coarse_step);
    for (double dw = 0.0; dw <= span;
         dw += step * std::max(1.0, dw / (3.0 * width))) {
      grid.insert(wc + dw);
      grid.insert(wc - dw);
    }
  }
  return std::vector<double>(grid.begin(), grid.end());
}

}  // namespace

ExcitedAmplitude excited_amplitude(const BlockHamiltonian& blocks,
                                   const Eigen::VectorXd& t_grid,
                                   double tolerance, int threads) {
  if (blocks.n_target != 1)
    throw std::invalid_argument("excited_amplitude: exactly one target required");
  const int n = blocks.n_array + 1;
  const cdouble target_diag = blocks.tt()(0, 0);
  const double gamma_a = -2.0 * target_diag.imag();
  const double delta_a = target_diag.real();

  ExcitedAmplitude out;
  out.t = t_grid;
  out.ode.resize(t_grid.size());
  out.resolvent.resize(t_grid.size());

  // route (i): direct propagation of the amplitude equations
  const Eigen::MatrixXcd& m = blocks.full;
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(n);
  psi0[n - 1] = 1.0;  // target excited, arrays in the ground state
  Eigen::VectorXcd scratch(n);
  integrate_dopri5(
      [&](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) {
        dydt.noalias() = cdouble(0.0, -1.0) * (m * y);
      },
      psi0, 0.0, std::span<const double>(t_grid.data(), t_grid.size()),
      [&](std::size_t i, const Eigen::VectorXcd& y) { out.ode[i] = y[n - 1]; },
      1e-9);

  // route (ii): inverse Fourier transform of the resolvent. The free-atom
  // part integrates analytically; the remainder decays like 1/w^3.
  if (blocks.n_array == 0) {
    for (Eigen::Index i = 0; i < t_grid.size(); ++i)
      out.resolvent[i] =
          std::exp(cdouble(0.0, -delta_a * t_grid[i]) - 0.5 * gamma_a * t_grid[i]);
  } else {
    // pole locations (full system and array block) only guide the grid; the
    // sampled values come from dense factorized solves
    const Eigen::MatrixXcd h_aa = blocks.aa();
    EigResult full_eig = eig_dense(m);
    EigResult array_eig = eig_dense(h_aa);
    Eigen::VectorXcd pole_guides(full_eig.values.size() + array_eig.values.size());
    pole_guides << full_eig.values, array_eig.values;
    const Eigen::VectorXcd h_ta = blocks.h_ta();
    const Eigen::VectorXcd h_at = blocks.h_at();
    const double tail_weight = std::abs((h_ta.transpose() * h_at)(0, 0));
    const HessenbergResolvent sigma_eval(h_aa, h_ta, h_at);

    Eigen::VectorXcd previous;
    for (int level = 0; level < 4; ++level) {
      std::vector<double> w_grid = resolvent_grid(pole_guides, tail_weight, level);
      std::vector<cdouble> corr(w_grid.size());
      parallel_for(
          w_grid.size(),
          [&](std::size_t i) {
            const double w = w_grid[i];
            const cdouble d0 = w - delta_a + cdouble(0.0, 0.5 * gamma_a);
            const cdouble sigma = sigma_eval(w);
            corr[i] = sigma / ((d0 - sigma) * d0);
          },
          threads);
      for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        cdouble free_part =
            std::exp(cdouble(0.0, -delta_a * t) - 0.5 * gamma_a * t);
        cdouble correction =
            cdouble(0.0, 1.0) / (2.0 * pi) * filon_linear(w_grid, corr, t);
        out.resolvent[i] = free_part + correction;
      }
      if (previous.size() == out.resolvent.size() &&
          (previous - out.resolvent).cwiseAbs().maxCoeff() < 0.3 * tolerance)
        break;
      previous = out.resolvent;
    }
  }

  out.max_disagreement = (out.ode - out.resolvent).cwiseAbs().maxCoeff();
  if (out.max_disagreement > tolerance)
    throw numerical_failure(
        "excited_amplitude: ODE and resolvent routes disagree by " +
        std::to_string(out.max_disagreement));
  return out;
}

void write_spectrum_csv(const std::string& path, const SpectrumCurve& curve,
                        cdouble lambda_c, cdouble g2) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_spectrum_csv: cannot open " + path);
  Eigen::VectorXd a = curve.spectral_function();
  Eigen::VectorXd a_sub = curve.spectral_function_subtracted(lambda_c, g2);
  std::fprintf(f, "omega,re_sigma,im_sigma,A,A_subtracted\n");
  for (Eigen::Index i = 0; i < curve.omega.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", curve.omega[i],
                 curve.sigma[i].real(), curve.sigma[i].imag(), a[i], a_sub[i]);
  std::fclose(f);
}

}  // namespace arraycav
