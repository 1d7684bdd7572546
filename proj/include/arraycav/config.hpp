#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace arraycav {

// Raised on malformed or physically invalid configuration; the CLI maps it
// to exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct StarkConfig {
  double alpha = 0.0;
  double w_stark = 1.0;
};

struct GeometryConfig {
  double a = 0.47;
  int n = 10;
  double length = 1.5;
  std::optional<double> w0;  // absent = flat mirrors
  std::optional<StarkConfig> stark;
};

struct RamanSettings {
  std::optional<double> rabi;    // absent = matched to kappa/gamma_3d
  std::optional<double> delta1;  // absent = auto two-photon retune
  double delta2 = 500.0;
};

struct TargetSettings {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double gamma_a = 1.0;
  std::optional<double> detuning;  // absent = tuned to the cavity resonance
  std::optional<RamanSettings> raman;
};

struct TrapSettings {
  double v0_over_er = 2000.0;
};

struct MotionSettings {
  std::string regime = "none";  // none | frozen | fast
  std::optional<double> sigma;
  std::optional<TrapSettings> trap;
  int n_realizations = 200;
  std::uint64_t seed = 1;
  std::string axes = "xyz";
};

struct SweepSettings {
  std::string variable;
  std::vector<double> values;
};

struct OutputSettings {
  std::string directory = "out";
  bool far_field = false;
};

struct ExperimentConfig {
  GeometryConfig geometry;
  std::vector<TargetSettings> targets;
  MotionSettings motion;
  std::optional<SweepSettings> sweep;
  OutputSettings output;
};

// Strict parse: unknown keys anywhere are rejected with their path; all
// physical preconditions are validated before any computation starts.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

std::string config_to_json(const ExperimentConfig& config);

}  // namespace arraycav
