#include "arraycav/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace arraycav {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

void integrate_dopri5(
    const std::function<void(double, const Eigen::VectorXcd&, Eigen::VectorXcd&)>& f,
    Eigen::VectorXcd y, double t0, std::span<const double> t_out,
    const std::function<void(std::size_t, const Eigen::VectorXcd&)>& sink,
    double tol) {
  if (t_out.empty()) return;
  const auto n = y.size();
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);

  double t = t0;
  std::size_t next_out = 0;
  while (next_out < t_out.size() && t_out[next_out] <= t0) {
    sink(next_out, y);
    ++next_out;
  }
  if (next_out >= t_out.size()) return;

  const double t_end = t_out.back();
  const double span = t_end - t0;
  double dt = span / 1000.0;
  f(t, y, k1);  // FSAL seed
  bool k1_fresh = true;

  while (t < t_end) {
    // land exactly on the next requested output time
    double dt_attempt = std::min(dt, t_out[next_out] - t);
    if (dt_attempt < 1e-14 * std::max(1.0, std::abs(span)))
      throw numerical_failure("integrate_dopri5: step size underflow at t=" +
                              std::to_string(t));
    if (!k1_fresh) f(t, y, k1);

    tmp = y + dt_attempt * (a21 * k1);
    f(t + c2 * dt_attempt, tmp, k2);
    tmp = y + dt_attempt * (a31 * k1 + a32 * k2);
    f(t + c3 * dt_attempt, tmp, k3);
    tmp = y + dt_attempt * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * dt_attempt, tmp, k4);
    tmp = y + dt_attempt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * dt_attempt, tmp, k5);
    tmp = y + dt_attempt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + dt_attempt, tmp, k6);
    y5 = y + dt_attempt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + dt_attempt, y5, k7);

    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      cdouble e = dt_attempt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double scale = 1.0 + std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / scale);
    }

    if (err <= tol) {
      double t_new = t + dt_attempt;
      y.swap(y5);
      k1.swap(k7);  // FSAL
      k1_fresh = true;
      t = t_new;
      while (next_out < t_out.size() && t_out[next_out] <= t + 1e-15) {
        sink(next_out, y);
        ++next_out;
      }
      if (next_out >= t_out.size()) return;
    } else {
      k1_fresh = false;
    }
    double factor = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    dt = dt_attempt * std::clamp(factor, 0.2, 5.0);
  }
}

cdouble filon_linear(std::span<const double> omega, std::span<const cdouble> f,
                     double t) {
  if (omega.size() != f.size() || omega.size() < 2)
    throw std::invalid_argument("filon_linear: bad grid");
  // phi0(z) = (e^z - 1)/z, phi1(z) = (e^z - 1 - z)/z^2, z = -i t h
  auto phi = [](cdouble z, cdouble& p0, cdouble& p1) {
    if (std::abs(z) < 1e-4) {
      p0 = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
      p1 = 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
    } else {
      cdouble ez = std::exp(z);
      p0 = (ez - 1.0) / z;
      p1 = (ez - 1.0 - z) / (z * z);
    }
  };
  cdouble total = 0.0;
  for (std::size_t s = 0; s + 1 < omega.size(); ++s) {
    double h = omega[s + 1] - omega[s];
    cdouble z(0.0, -t * h);
    cdouble p0, p1;
    phi(z, p0, p1);
    cdouble head = std::exp(cdouble(0.0, -t * omega[s]));
    total += head * h * (f[s] * p0 + (f[s + 1] - f[s]) * p1);
  }
  return total;
}

}  // namespace arraycav
