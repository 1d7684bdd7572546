#include "arraycav/extract.hpp"

#include <memory>

#include "arraycav/linalg.hpp"

namespace arraycav {

namespace {

CavityParams params_from_mode(const BlockHamiltonian& blocks, cdouble lambda_c,
                              cdouble g2, int mode_index, double gamma_a,
                              bool compute_gamma3d) {
  Gamma3dResult g3d{gamma_a, false};
  if (compute_gamma3d && blocks.n_array > 0)
    g3d = gamma_3d(blocks, lambda_c, g2, gamma_a, lambda_c.real());
  return make_cavity_params(lambda_c, g2, g3d.value, mode_index, g3d.unreliable);
}

}  // namespace

CavityParams extract_cavity_params(const DipoleSet& layout,
                                   std::optional<double> fast_sigma,
                                   const ExtractOptions& options) {
  if (layout.n_target() < 1)
    throw std::invalid_argument("extract_cavity_params: a probe target is required");
  BlockHamiltonian blocks = assemble_hamiltonian(layout, fast_sigma, options.threads);
  EigenmodeSet modes = eigenmodes(blocks.aa());
  Eigen::VectorXcd g2 = couple_strengths(modes, blocks.h_ta(options.probe_target),
                                         blocks.h_at(options.probe_target));
  int mode = identify_cavity_mode(modes, g2);
  const double gamma_a = layout.target_atoms[options.probe_target].linewidth;

  BlockHamiltonian probe_blocks = std::move(blocks);
  if (layout.n_target() > 1) {
    // gamma_3d is defined for a single probe target
    DipoleSet probe_layout = layout;
    probe_layout.target_atoms = {layout.target_atoms[options.probe_target]};
    probe_blocks = assemble_hamiltonian(probe_layout, fast_sigma, options.threads);
  }
  return params_from_mode(probe_blocks, modes.eigenvalues[mode], g2[mode], mode,
                          gamma_a, options.compute_gamma3d);
}

CavityExtractor full_extractor(ExtractOptions options) {
  return [options](const DipoleSet& layout, std::optional<double> fast_sigma) {
    return extract_cavity_params(layout, fast_sigma, options);
  };
}

CavityExtractor tracked_extractor(const DipoleSet& ideal, ExtractOptions options) {
  // reference eigenpair from one full decomposition of the ideal layout
  auto reference = std::make_shared<CavityParams>(
      extract_cavity_params(ideal, {}, options));
  BlockHamiltonian ideal_blocks = assemble_hamiltonian(ideal, {}, options.threads);
  EigenmodeSet ideal_modes = eigenmodes(ideal_blocks.aa());
  auto v_ref = std::make_shared<Eigen::VectorXcd>(
      ideal_modes.right.col(reference->mode_index));
  auto lambda_ref = std::make_shared<cdouble>(
      ideal_modes.eigenvalues[reference->mode_index]);

  return [reference, v_ref, lambda_ref, options](
             const DipoleSet& layout,
             std::optional<double> fast_sigma) -> CavityParams {
    if (layout.n_target() < 1)
      throw std::invalid_argument("tracked_extractor: a probe target is required");
    BlockHamiltonian blocks =
        assemble_hamiltonian(layout, fast_sigma, options.threads);
    TrackedMode tracked =
        inverse_iterate(blocks.aa(), *lambda_ref, *v_ref);
    double overlap =
        tracked.converged
            ? std::abs(v_ref->normalized().dot(tracked.vector.normalized()))
            : 0.0;
    if (!tracked.converged || overlap < 0.3) {
      // disorder pushed the mode too far; pay for the full decomposition
      return extract_cavity_params(layout, fast_sigma, options);
    }
    // bilinear-normalized coupling of the tracked mode
    Eigen::VectorXcd v = tracked.vector;
    cdouble s = (v.transpose() * v)(0, 0);
    v /= std::sqrt(s);
    const Eigen::VectorXcd h_ta = blocks.h_ta(options.probe_target);
    const Eigen::VectorXcd h_at = blocks.h_at(options.probe_target);
    cdouble g2 = (h_ta.transpose() * v)(0, 0) * (v.transpose() * h_at)(0, 0);
    const double gamma_a = layout.target_atoms[options.probe_target].linewidth;
    if (layout.n_target() > 1) {
      DipoleSet probe_layout = layout;
      probe_layout.target_atoms = {layout.target_atoms[options.probe_target]};
      blocks = assemble_hamiltonian(probe_layout, fast_sigma, options.threads);
    }
    return params_from_mode(blocks, tracked.lambda, g2, -1, gamma_a,
                            options.compute_gamma3d);
  };
}

}  // namespace arraycav
