#include "arraycav/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "arraycav/linalg.hpp"

namespace arraycav {

DipoleSet layout_from_config(const GeometryConfig& geometry,
                             const std::vector<TargetSettings>& targets,
                             double omega_c_hint) {
  std::vector<Dipole> dipoles;
  for (const auto& t : targets)
    dipoles.push_back(make_target(t.position, t.gamma_a,
                                  t.detuning.value_or(omega_c_hint)));
  std::optional<StarkProfile> stark;
  if (geometry.stark)
    stark = StarkProfile{geometry.stark->alpha, geometry.stark->w_stark};
  return make_cavity(geometry.n, geometry.a, geometry.length, geometry.w0,
                     std::move(dipoles), stark);
}

CavityCharacterization characterize_cavity(const DipoleSet& layout,
                                           std::optional<double> fast_sigma,
                                           int probe_target, int threads) {
  if (layout.n_target() < 1)
    throw std::invalid_argument("characterize_cavity: a probe target is required");
  CavityCharacterization out;
  out.blocks = assemble_hamiltonian(layout, fast_sigma, threads);
  out.modes = eigenmodes(out.blocks.aa());
  out.g2 = couple_strengths(out.modes, out.blocks.h_ta(probe_target),
                            out.blocks.h_at(probe_target));
  out.fundamental = identify_cavity_mode(out.modes, out.g2);
  const cdouble lambda_c = out.modes.eigenvalues[out.fundamental];
  const double gamma_a = layout.target_atoms[probe_target].linewidth;

  Gamma3dResult g3{gamma_a, false};
  if (layout.n_target() == 1) {
    g3 = gamma_3d(out.blocks, lambda_c, out.g2[out.fundamental], gamma_a,
                  lambda_c.real());
  } else {
    DipoleSet probe_layout = layout;
    probe_layout.target_atoms = {layout.target_atoms[probe_target]};
    BlockHamiltonian probe = assemble_hamiltonian(probe_layout, fast_sigma, threads);
    g3 = gamma_3d(probe, lambda_c, out.g2[out.fundamental], gamma_a,
                  lambda_c.real());
  }
  out.params = make_cavity_params(lambda_c, out.g2[out.fundamental], g3.value,
                                  out.fundamental, g3.unreliable);
  return out;
}

RetuneReport retune_two_photon(LambdaSystem& system, int max_passes) {
  RetuneReport report;
  for (int pass = 0; pass < max_passes; ++pass) {
    EigResult full = eig_dense(system.matrix);
    // classify dressed levels by their total |g2> weight
    double e_dark = 0.0, best_dark = -1.0;
    std::vector<std::pair<double, double>> doublet;  // (weight, energy)
    for (Eigen::Index m = 0; m < full.values.size(); ++m) {
      double w_g2 = 0.0;
      for (int t = 0; t < system.n_target; ++t)
        w_g2 += std::norm(full.vectors(system.g2_index(t), m));
      if (system.n_target > 1 && w_g2 > 0.9) {
        if (w_g2 > best_dark) {
          best_dark = w_g2;
          e_dark = full.values[m].real();
        }
      } else if (w_g2 > 0.15) {
        doublet.emplace_back(w_g2, full.values[m].real());
      }
    }
    std::sort(doublet.begin(), doublet.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double shift = 0.0;
    if (system.n_target > 1 && best_dark > 0 && doublet.size() >= 2) {
      // center the dark level inside the bright doublet
      double center = 0.5 * (doublet[0].second + doublet[1].second);
      shift = 2.0 * (center - e_dark);
    } else if (system.n_target == 1 && doublet.size() >= 2) {
      // single target: equalize the g2 weights of the dressed pair;
      // to first order the g2 detuning is (w0 - w1)(E0 - E1)
      shift = -(doublet[0].first - doublet[1].first) *
              (doublet[0].second - doublet[1].second);
    } else {
      return report;  // structure not recognized; keep the analytic seed
    }
    for (int t = 0; t < system.n_target; ++t)
      system.matrix(system.g2_index(t), system.g2_index(t)) += shift;
    report.applied_shift += shift;
    ++report.passes;
    if (std::abs(shift) < 1e-9) {
      report.converged = true;
      return report;
    }
  }
  report.converged = true;
  return report;
}

TransferResult run_transfer_experiment(const DipoleSet& cavity,
                                       const TransferSettings& settings,
                                       int threads) {
  const int nt = cavity.n_target();
  if (nt < 1 || nt > 2)
    throw std::invalid_argument("run_transfer_experiment: one or two targets");
  const double gamma_a = cavity.target_atoms[0].linewidth;

  TransferResult out;
  CavityCharacterization chr = characterize_cavity(cavity, {}, 0, threads);
  out.params = chr.params;
  const cdouble lambda_c = chr.modes.eigenvalues[chr.fundamental];

  RamanConfig raman;
  raman.delta2 = settings.delta2 * gamma_a;
  raman.delta1 = settings.delta1 ? *settings.delta1 * gamma_a : raman.delta2;
  raman.rabi = settings.rabi
                   ? *settings.rabi * gamma_a
                   : matched_drive_rabi(out.params.kappa, out.params.gamma_3d,
                                        raman.delta1, raman.delta2);
  out.raman = raman;
  Warnings warnings;
  out.effective = raman_effective(raman, out.params.g, out.params.gamma_3d,
                                  out.params.kappa, &warnings);

  // e levels sit Delta1 above the cavity resonance
  BlockHamiltonian blocks = std::move(chr.blocks);
  const int na = blocks.n_array;
  Eigen::VectorXcd per_g(nt);
  for (int m = 0; m < nt; ++m) {
    blocks.full(na + m, na + m) =
        cdouble(lambda_c.real() + raman.delta1,
                -0.5 * cavity.target_atoms[m].linewidth);
    Eigen::VectorXcd g2m =
        couple_strengths(chr.modes, blocks.h_ta(m), blocks.h_at(m));
    per_g[m] = std::sqrt(std::abs(g2m[chr.fundamental].real()));
  }
  std::vector<RamanConfig> raman_all(nt, raman);
  std::vector<double> dg2 = tuned_g2_detunings(blocks, raman_all, lambda_c,
                                               per_g, out.params.gamma_3d);
  LambdaSystem system = make_lambda_system(blocks, raman_all, dg2);
  if (!settings.delta1) retune_two_photon(system);

  out.transfer_time = nt == 2 ? pi / (std::sqrt(2.0) * out.effective.g_eff)
                              : pi / (2.0 * out.effective.g_eff);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(system.dim());
  psi0[system.g2_index(0)] = 1.0;
  Eigen::VectorXd t_grid = Eigen::VectorXd::LinSpaced(
      settings.n_times, 0.0, settings.horizon * out.transfer_time);
  out.trajectory = evolve(system, psi0, t_grid,
                          chr.modes.right.col(chr.fundamental), settings.method);
  out.fidelity = nt == 2 ? transfer_fidelity(out.trajectory, 1)
                         : cavity_transfer_fidelity(out.trajectory);
  out.prediction = fidelity_prediction(
      out.params.cooperativity,
      nt == 2 ? TransferMode::Exchange : TransferMode::Single);
  return out;
}

TransmissionScan scan_transmission(const DipoleSet& cavity,
                                   const GaussianBeam& beam, double center,
                                   double half_window, double resolve_width,
                                   int threads) {
  // coarse pass to bracket the peak, dense pass to resolve it
  const int n_coarse = 81;
  Eigen::VectorXd coarse =
      Eigen::VectorXd::LinSpaced(n_coarse, center - half_window, center + half_window);
  CavitySpectrum coarse_spec =
      cavity_transmission_spectrum(cavity, beam, coarse, threads);
  Eigen::Index peak_i = 0;
  coarse_spec.transmission.maxCoeff(&peak_i);

  const double window = std::max(6.0 * resolve_width,
                                 4.0 * (coarse[1] - coarse[0]));
  Eigen::VectorXd dense = Eigen::VectorXd::LinSpaced(
      161, coarse[peak_i] - window, coarse[peak_i] + window);
  CavitySpectrum dense_spec =
      cavity_transmission_spectrum(cavity, beam, dense, threads);

  TransmissionScan out;
  // merge both scans
  std::vector<std::pair<double, std::array<double, 3>>> merged;
  for (Eigen::Index i = 0; i < coarse.size(); ++i)
    merged.push_back({coarse[i],
                      {coarse_spec.transmission[i], coarse_spec.reflection[i],
                       coarse_spec.loss[i]}});
  for (Eigen::Index i = 0; i < dense.size(); ++i)
    merged.push_back({dense[i],
                      {dense_spec.transmission[i], dense_spec.reflection[i],
                       dense_spec.loss[i]}});
  std::sort(merged.begin(), merged.end());
  out.spectrum.omega.resize(static_cast<Eigen::Index>(merged.size()));
  out.spectrum.transmission.resize(out.spectrum.omega.size());
  out.spectrum.reflection.resize(out.spectrum.omega.size());
  out.spectrum.loss.resize(out.spectrum.omega.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    out.spectrum.omega[static_cast<Eigen::Index>(i)] = merged[i].first;
    out.spectrum.transmission[static_cast<Eigen::Index>(i)] = merged[i].second[0];
    out.spectrum.reflection[static_cast<Eigen::Index>(i)] = merged[i].second[1];
    out.spectrum.loss[static_cast<Eigen::Index>(i)] = merged[i].second[2];
  }

  Eigen::Index ip = 0;
  out.peak_value = out.spectrum.transmission.maxCoeff(&ip);
  out.peak_omega = out.spectrum.omega[ip];
  // FWHM by linear interpolation on both flanks
  const double half = 0.5 * out.peak_value;
  double lo = out.spectrum.omega[0], hi = out.spectrum.omega[out.spectrum.omega.size() - 1];
  for (Eigen::Index i = ip; i > 0; --i)
    if (out.spectrum.transmission[i - 1] < half) {
      double f = (half - out.spectrum.transmission[i - 1]) /
                 (out.spectrum.transmission[i] - out.spectrum.transmission[i - 1]);
      lo = out.spectrum.omega[i - 1] + f * (out.spectrum.omega[i] - out.spectrum.omega[i - 1]);
      break;
    }
  for (Eigen::Index i = ip; i + 1 < out.spectrum.omega.size(); ++i)
    if (out.spectrum.transmission[i + 1] < half) {
      double f = (out.spectrum.transmission[i] - half) /
                 (out.spectrum.transmission[i] - out.spectrum.transmission[i + 1]);
      hi = out.spectrum.omega[i] + f * (out.spectrum.omega[i + 1] - out.spectrum.omega[i]);
      break;
    }
  out.width = hi - lo;
  return out;
}

WaistFit fit_mode_waist(const Eigen::VectorXcd& mode, const DipoleSet& layout) {
  WaistFit fit;
  const int n2 = layout.n_side * layout.n_side;
  if (mode.size() < 2 * n2) return fit;
  // weighted least squares of ln|v| vs rho^2 on the z > 0 mirror
  double s_w = 0, s_x = 0, s_y = 0, s_xx = 0, s_xy = 0;
  double peak = 0.0;
  for (int i = n2; i < 2 * n2; ++i) peak = std::max(peak, std::abs(mode[i]));
  if (peak <= 0) return fit;
  for (int i = n2; i < 2 * n2; ++i) {
    const double amp = std::abs(mode[i]);
    if (amp < 1e-3 * peak) continue;
    const double rho2 = layout.array_atoms[i].position.head<2>().squaredNorm();
    const double y = std::log(amp);
    const double w = amp * amp;
    s_w += w;
    s_x += w * rho2;
    s_y += w * y;
    s_xx += w * rho2 * rho2;
    s_xy += w * rho2 * y;
  }
  const double denom = s_w * s_xx - s_x * s_x;
  if (std::abs(denom) < 1e-30) return fit;
  const double slope = (s_w * s_xy - s_x * s_y) / denom;  // = -1/w(L/2)^2
  if (slope >= 0.0) return fit;
  fit.w_mirror = std::sqrt(-1.0 / slope);
  // w(L/2)^2 = w0^2 + (L/(k0 w0))^2, take the waist branch
  const double w2 = fit.w_mirror * fit.w_mirror;
  const double disc = w2 * w2 - 4.0 * std::pow(layout.length / k0, 2);
  if (disc < 0.0) return fit;
  fit.w0 = std::sqrt(0.5 * (w2 + std::sqrt(disc)));
  fit.valid = true;
  return fit;
}

}  // namespace arraycav
