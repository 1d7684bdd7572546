#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "arraycav/experiments.hpp"
#include "arraycav/linalg.hpp"
#include "arraycav/parallel.hpp"

namespace arraycav::cli {

namespace {

constexpr const char* kVersion = "arraycav 1.0.0";

struct Prepared {
  ExperimentConfig config;
  std::filesystem::path out;
};

Prepared prepare(const RunOptions& options, const std::string& command) {
  Prepared p;
  p.config = parse_config_file(options.config_path);
  if (options.threads > 0) set_default_threads(options.threads);
  if (options.seed_given) p.config.motion.seed = options.seed;
  p.out = options.out_dir.empty() ? p.config.output.directory : options.out_dir;
  std::filesystem::create_directories(p.out);

  std::ofstream manifest(p.out / "manifest.json");
  manifest << "{\n  \"command\": \"" << command << "\",\n  \"version\": \""
           << kVersion << "\",\n  \"seed\": " << p.config.motion.seed
           << ",\n  \"threads\": " << default_threads() << ",\n  \"config\": "
           << config_to_json(p.config) << "\n}\n";
  return p;
}

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::string& header) {
    file_ = std::fopen(path.c_str(), "w");
    if (!file_) throw std::runtime_error("cannot open " + path.string());
    std::fprintf(file_, "%s\n", header.c_str());
  }
  ~Csv() {
    if (file_) std::fclose(file_);
  }
  Csv(const Csv&) = delete;
  Csv& operator=(const Csv&) = delete;

  void row(const std::vector<double>& values, const std::string& tail = {}) {
    for (std::size_t i = 0; i < values.size(); ++i)
      std::fprintf(file_, i ? ",%.17g" : "%.17g", values[i]);
    if (!tail.empty()) std::fprintf(file_, ",%s", tail.c_str());
    std::fprintf(file_, "\n");
  }

 private:
  std::FILE* file_ = nullptr;
};

// single probe target at the standing-wave antinode closest to the center
TargetSettings default_probe(double length) {
  TargetSettings t;
  double z = 0.0;
  // antinodes of sin(k0 (z + L/2)) at z = -L/2 + (m + 1/2)/2
  double m = std::round(length - 0.5);
  z = -0.5 * length + 0.25 + 0.5 * m;
  if (std::abs(z) > 0.26) z = 0.0;
  t.position = Eigen::Vector3d(0, 0, z);
  return t;
}

double erf_clip_reflection(int n, double a, double w0) {
  double x = n * a / (std::sqrt(2.0) * w0);
  return std::pow(std::erf(x), 2);
}

}  // namespace

int cmd_spectrum(const RunOptions& options) {
  Prepared p = prepare(options, "spectrum");
  std::vector<TargetSettings> targets = p.config.targets;
  if (targets.empty()) targets = {default_probe(p.config.geometry.length)};
  DipoleSet layout = layout_from_config(p.config.geometry, targets);
  CavityCharacterization chr =
      characterize_cavity(layout, {}, 0, default_threads());

  const double gamma0_collective = collective_linewidth(p.config.geometry.a);
  // dense coverage near the strongest resonances, coarse elsewhere
  std::vector<cdouble> resonances;
  std::vector<int> order(chr.modes.size());
  for (int m = 0; m < chr.modes.size(); ++m) order[m] = m;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return chr.g2[a].real() / std::max(chr.modes.kappa(a), 1e-300) >
           chr.g2[b].real() / std::max(chr.modes.kappa(b), 1e-300);
  });
  for (int i = 0; i < std::min<int>(4, chr.modes.size()); ++i)
    resonances.push_back(chr.modes.eigenvalues[order[i]]);
  const double center = chr.params.omega_c;
  Eigen::VectorXd grid =
      make_spectral_grid(center - 2.0 * gamma0_collective,
                         center + 2.0 * gamma0_collective,
                         gamma0_collective / 60.0, resonances);

  SpectrumCurve curve = self_energy(chr.blocks, grid, default_threads());
  write_spectrum_csv((p.out / "spectrum.csv").string(), curve,
                     chr.modes.eigenvalues[chr.fundamental],
                     chr.g2[chr.fundamental]);
  write_modes_csv((p.out / "modes.csv").string(), chr.modes, chr.g2);
  return 0;
}

int cmd_cavity_params(const RunOptions& options) {
  Prepared p = prepare(options, "cavity-params");
  std::vector<double> values{0.0};
  std::string variable = "";
  if (p.config.sweep) {
    variable = p.config.sweep->variable;
    values = p.config.sweep->values;
    if (variable != "w0" && variable != "a" && variable != "L")
      throw config_error("cavity-params: sweep variable must be w0, a or L");
  }

  Csv csv(p.out / "params.csv", "w0,a,L,g,kappa,gamma3d,C,g_est,kappa_est");
  for (double value : values) {
    GeometryConfig geometry = p.config.geometry;
    if (variable == "w0") geometry.w0 = value;
    if (variable == "a") geometry.a = value;
    if (variable == "L") geometry.length = value;
    std::vector<TargetSettings> targets = p.config.targets;
    if (targets.empty()) targets = {default_probe(geometry.length)};
    DipoleSet layout = layout_from_config(geometry, targets);
    CavityCharacterization chr =
        characterize_cavity(layout, {}, 0, default_threads());
    const double w0_eff = geometry.w0.value_or(0.0);
    double g_est = 0.0, kappa_est = 0.0;
    if (geometry.w0) {
      AnalyticEstimates est = estimates(
          geometry.a, geometry.length, *geometry.w0, targets[0].gamma_a,
          std::min(erf_clip_reflection(geometry.n, geometry.a, *geometry.w0),
                   1.0 - 1e-12));
      g_est = est.g_est;
      kappa_est = est.kappa_est;
    }
    csv.row({w0_eff, geometry.a, geometry.length, chr.params.g, chr.params.kappa,
             chr.params.gamma_3d, chr.params.cooperativity, g_est, kappa_est});
  }
  return 0;
}

int cmd_transmission(const RunOptions& options) {
  Prepared p = prepare(options, "transmission");
  std::vector<double> lengths{p.config.geometry.length};
  if (p.config.sweep) {
    if (p.config.sweep->variable != "L")
      throw config_error("transmission: sweep variable must be L");
    lengths = p.config.sweep->values;
  }

  Csv csv(p.out / "transmission.csv", "L,omega,T_cav,R_cav,S_cav");
  const double gamma0_collective = collective_linewidth(p.config.geometry.a);
  for (double length : lengths) {
    GeometryConfig geometry = p.config.geometry;
    geometry.length = length;
    if (!geometry.w0)
      throw config_error("transmission: curved mirrors (w0) required");
    GaussianBeam beam;
    beam.waist = *geometry.w0;

    // probe around the expected cavity resonance
    DipoleSet mirror = make_single_mirror(geometry.n, geometry.a, length,
                                          geometry.w0);
    BlockHamiltonian hm = assemble_hamiltonian(mirror, {}, default_threads());
    EigenmodeSet mm = eigenmodes(hm.aa());
    double wres = mm.omega(identify_fundamental_by_overlap(mm, mirror, beam));
    double delta_l = length - 0.5 * std::round(length / 0.5);
    double shift = std::tan(-k0 * delta_l) * 0.5 * gamma0_collective;
    double resolve = std::max(std::pow(k0 * delta_l, 2) * 0.5 * gamma0_collective,
                              2e-4);

    DipoleSet cavity = layout_from_config(geometry, p.config.targets, wres + shift);
    TransmissionScan scan = scan_transmission(cavity, beam, wres + shift,
                                              0.5 * gamma0_collective, resolve,
                                              default_threads());
    for (Eigen::Index i = 0; i < scan.spectrum.omega.size(); ++i)
      csv.row({length, scan.spectrum.omega[i], scan.spectrum.transmission[i],
               scan.spectrum.reflection[i], scan.spectrum.loss[i]});

    if (p.config.output.far_field) {
      DipoleSet probed = cavity;
      if (probed.target_atoms.empty())
        probed = layout_from_config(geometry, {default_probe(length)});
      CavityCharacterization chr =
          characterize_cavity(probed, {}, 0, default_threads());
      Eigen::VectorXd theta = Eigen::VectorXd::LinSpaced(120, 1e-3, 0.5 * pi);
      Eigen::VectorXd pattern =
          far_field_pattern(chr.modes.right.col(chr.fundamental), probed, theta);
      Csv far(p.out / ("farfield_L" + std::to_string(length) + ".csv"),
              "theta,intensity");
      for (Eigen::Index i = 0; i < theta.size(); ++i)
        far.row({theta[i], pattern[i]});
    }
  }
  return 0;
}

int cmd_dynamics(const RunOptions& options) {
  Prepared p = prepare(options, "dynamics");
  if (p.config.targets.empty() || p.config.targets.size() > 2)
    throw config_error("dynamics: one or two targets required");
  DipoleSet cavity = layout_from_config(p.config.geometry, p.config.targets);

  TransferSettings settings;
  if (p.config.targets[0].raman) {
    const RamanSettings& r = *p.config.targets[0].raman;
    settings.delta2 = r.delta2;
    settings.rabi = r.rabi;
    settings.delta1 = r.delta1;
  }
  TransferResult result = run_transfer_experiment(cavity, settings,
                                                  default_threads());
  write_trajectory_csv((p.out / "dynamics.csv").string(), result.trajectory);

  Csv summary(p.out / "summary.csv",
              "C,g,kappa,gamma3d,omega_c,Omega,Delta1,Delta2,g_eff,gamma_eff,"
              "fidelity,prediction");
  summary.row({result.params.cooperativity, result.params.g, result.params.kappa,
               result.params.gamma_3d, result.params.omega_c, result.raman.rabi,
               result.raman.delta1, result.raman.delta2, result.effective.g_eff,
               result.effective.gamma_eff, result.fidelity, result.prediction});
  return 0;
}

int cmd_motion(const RunOptions& options) {
  Prepared p = prepare(options, "motion");
  const MotionSettings& motion = p.config.motion;
  if (motion.regime == "none")
    throw config_error("motion: regime must be frozen or fast");

  std::vector<double> sigmas;
  if (p.config.sweep && p.config.sweep->variable == "sigma")
    sigmas = p.config.sweep->values;
  else if (motion.sigma)
    sigmas = {*motion.sigma};
  else if (motion.trap)
    sigmas = {lamb_dicke_sigma(motion.trap->v0_over_er, p.config.geometry.a)};
  else
    throw config_error("motion: no sigma given");

  std::vector<TargetSettings> targets = p.config.targets;
  if (targets.empty()) targets = {default_probe(p.config.geometry.length)};
  DipoleSet ideal = layout_from_config(p.config.geometry, targets);
  CavityExtractor extractor = tracked_extractor(ideal, {0, true, default_threads()});

  Eigen::Vector3d axis_mask = Eigen::Vector3d::Zero();
  if (motion.axes.find('x') != std::string::npos) axis_mask.x() = 1.0;
  if (motion.axes.find('y') != std::string::npos) axis_mask.y() = 1.0;
  if (motion.axes.find('z') != std::string::npos) axis_mask.z() = 1.0;

  Csv csv(p.out / "motion.csv",
          "sigma,axis_mask,mean_g,se_g,mean_kappa,se_kappa,n_ok");
  const double mask_code = axis_mask.x() * 100 + axis_mask.y() * 10 + axis_mask.z();
  for (double sigma : sigmas) {
    if (motion.regime == "fast") {
      CavityParams fast = fast_motion_params(ideal, sigma, extractor);
      csv.row({sigma, mask_code, fast.g, 0.0, fast.kappa, 0.0, 1});
    } else {
      EnsembleStats stats =
          frozen_average(ideal, (sigma * axis_mask).eval(), motion.n_realizations,
                         motion.seed, extractor);
      csv.row({sigma, mask_code, stats.mean.g, stats.standard_error.g,
               stats.mean.kappa, stats.standard_error.kappa,
               static_cast<double>(stats.n_ok)});
    }
  }
  return 0;
}

int cmd_stark(const RunOptions& options) {
  Prepared p = prepare(options, "stark");
  if (p.config.geometry.w0)
    throw config_error("stark: geometry must use flat mirrors");
  if (!p.config.geometry.stark)
    throw config_error("stark: geometry.stark section required");

  std::vector<double> alphas{p.config.geometry.stark->alpha};
  if (p.config.sweep) {
    if (p.config.sweep->variable != "alpha")
      throw config_error("stark: sweep variable must be alpha");
    alphas = p.config.sweep->values;
  }

  const double gamma0_collective = collective_linewidth(p.config.geometry.a);
  Csv csv(p.out / "stark.csv", "alpha,w0_fit,w0_pred,g,kappa,gamma3d,g_est");
  for (double alpha : alphas) {
    GeometryConfig geometry = p.config.geometry;
    geometry.stark->alpha = alpha;
    std::vector<TargetSettings> targets = p.config.targets;
    if (targets.empty()) targets = {default_probe(geometry.length)};
    DipoleSet layout = layout_from_config(geometry, targets);
    CavityCharacterization chr =
        characterize_cavity(layout, {}, 0, default_threads());
    WaistFit fit =
        fit_mode_waist(chr.modes.right.col(chr.fundamental), layout);
    Warnings warnings;
    double w0_pred = stark_waist(geometry.length,
                                 geometry.stark->w_stark, alpha,
                                 gamma0_collective, &warnings);
    double g_est =
        fit.valid
            ? std::sqrt(9.0 * pi * targets[0].gamma_a) / (k0 * k0 * fit.w0 * geometry.a)
            : 0.0;
    csv.row({alpha, fit.valid ? fit.w0 : 0.0, w0_pred, chr.params.g,
             chr.params.kappa, chr.params.gamma_3d, g_est});
  }
  return 0;
}

int cmd_mirror(const RunOptions& options) {
  Prepared p = prepare(options, "mirror");
  const GeometryConfig& geometry = p.config.geometry;
  DipoleSet mirror = make_single_mirror(
      geometry.n, geometry.a, geometry.w0 ? geometry.length : 0.0, geometry.w0);
  GaussianBeam beam;
  // flat mirrors: pick a probe waist the mirror comfortably contains
  beam.waist = geometry.w0.value_or(std::min(3.0, geometry.n * geometry.a / 3.0));

  BlockHamiltonian blocks = assemble_hamiltonian(mirror, {}, default_threads());
  EigenmodeSet modes = eigenmodes(blocks.aa());
  double wres = modes.omega(identify_fundamental_by_overlap(modes, mirror, beam));

  std::vector<double> deltas;
  if (p.config.sweep && p.config.sweep->variable == "delta") {
    deltas = p.config.sweep->values;
  } else {
    const double gamma0_collective = collective_linewidth(geometry.a);
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(
        81, wres - 3.0 * gamma0_collective, wres + 3.0 * gamma0_collective);
    deltas.assign(grid.data(), grid.data() + grid.size());
  }

  ModeProjector projector(mirror, beam, 5.0, 1e-6, default_threads());
  Eigen::VectorXcd drive = drive_vector(mirror, beam, 1.0);
  std::vector<ScatterCoefficients> coefficients(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    coefficients[i] = projector.project(steady_state(blocks, drive, deltas[i]));
  });

  Csv csv(p.out / "mirror.csv", "delta,R,T,S,r_re,r_im,t_re,t_im");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const ScatterCoefficients& c = coefficients[i];
    csv.row({deltas[i], c.reflection(), c.transmission(), c.scattering_loss(),
             c.r.real(), c.r.imag(), c.t.real(), c.t.imag()});
  }
  return 0;
}

}  // namespace arraycav::cli
