#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>

#include "arraycav/common.hpp"

namespace arraycav {

// Adaptive Dormand-Prince 5(4). Integrates y' = f(t, y) from t0 through the
// ascending output times, calling sink(index, y) at each. tol is the local
// error bound per step (mixed absolute/relative, infinity norm). Throws
// numerical_failure on step-size underflow.
void integrate_dopri5(
    const std::function<void(double, const Eigen::VectorXcd&, Eigen::VectorXcd&)>& f,
    Eigen::VectorXcd y0, double t0, std::span<const double> t_out,
    const std::function<void(std::size_t, const Eigen::VectorXcd&)>& sink,
    double tol = 1e-9);

// Integral of f(w) e^{-i w t} dw over a sorted grid, with f linear on each
// segment (Filon-type rule: exact moments, so accuracy is set by the
// interpolation of f, not by the oscillation of the phase factor).
cdouble filon_linear(std::span<const double> omega, std::span<const cdouble> f,
                     double t);

}  // namespace arraycav
