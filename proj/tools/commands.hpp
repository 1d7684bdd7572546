#pragma once

#include <string>

#include "arraycav/config.hpp"

namespace arraycav::cli {

struct RunOptions {
  std::string config_path;
  std::string out_dir;      // overrides config output.directory when set
  int threads = 0;          // 0 = hardware default
  std::uint64_t seed = 0;   // overrides motion.seed when nonzero
  bool seed_given = false;
};

int cmd_spectrum(const RunOptions& options);
int cmd_cavity_params(const RunOptions& options);
int cmd_transmission(const RunOptions& options);
int cmd_dynamics(const RunOptions& options);
int cmd_motion(const RunOptions& options);
int cmd_stark(const RunOptions& options);
int cmd_mirror(const RunOptions& options);

}  // namespace arraycav::cli
