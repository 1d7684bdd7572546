#pragma once

#include <functional>
#include <optional>

#include "arraycav/modes.hpp"
#include "arraycav/spectral.hpp"

namespace arraycav {

// Maps a layout (plus optional fast-motion sigma) to cavity QED parameters.
using CavityExtractor =
    std::function<CavityParams(const DipoleSet&, std::optional<double>)>;

struct ExtractOptions {
  int probe_target = 0;        // target used for the g^2 coupling probe
  bool compute_gamma3d = true; // one extra dense solve at omega_c
  int threads = 0;
};

// Full dense eigendecomposition of the array block, mode selection through
// g^2/kappa, gamma_3d from the mode-subtracted self-energy.
CavityParams extract_cavity_params(const DipoleSet& layout,
                                   std::optional<double> fast_sigma = {},
                                   const ExtractOptions& options = {});

CavityExtractor full_extractor(ExtractOptions options = {});

// Tracks the reference layout's cavity mode with dense-LU shifted inverse
// iteration (one LU per realization instead of a full decomposition). Falls
// back to the full extractor when tracking fails.
CavityExtractor tracked_extractor(const DipoleSet& ideal,
                                  ExtractOptions options = {});

}  // namespace arraycav
