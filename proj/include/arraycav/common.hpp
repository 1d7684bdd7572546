#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace arraycav {

inline constexpr double pi = 3.14159265358979323846;

// Global unit convention: lengths in lambda0, rates and detunings in gamma0,
// time in 1/gamma0. Frequencies are measured from the array-atom resonance.
inline constexpr double k0 = 2.0 * pi;

// omega0/gamma0 for the Rb D2 reference transition; only enters the
// conventional-cavity cross-checks (zeta, g_conv) and the Fabry-Perot
// propagation phase correction.
inline constexpr double default_quality_factor = 6.3e7;

using cdouble = std::complex<double>;

// Thrown when an iterative or numerical procedure misses its tolerance.
class numerical_failure : public std::runtime_error {
 public:
  explicit numerical_failure(const std::string& what) : std::runtime_error(what) {}
};

// Collects non-fatal validity warnings (regime checks, Bragg condition, ...).
struct Warnings {
  std::vector<std::string> messages;
  void add(std::string msg) { messages.push_back(std::move(msg)); }
  bool empty() const { return messages.empty(); }
};

inline void warn(Warnings* sink, std::string msg) {
  if (sink) sink->add(std::move(msg));
}

}  // namespace arraycav
