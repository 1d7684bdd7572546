#include "arraycav/scattering.hpp"

#include <cmath>

#include "arraycav/linalg.hpp"
#include "arraycav/parallel.hpp"

namespace arraycav {

ScatterCoefficients infinite_mirror_response(double delta, double gamma_k,
                                             double delta_k) {
  if (!(gamma_k > 0.0))
    throw std::invalid_argument("infinite_mirror_response: Gamma_k must be > 0");
  ScatterCoefficients out;
  out.r = cdouble(0.0, 0.5 * gamma_k) /
          cdouble(-delta + delta_k, -0.5 * gamma_k);
  out.t = 1.0 + out.r;
  return out;
}

Eigen::VectorXcd steady_state(const BlockHamiltonian& blocks,
                              const Eigen::VectorXcd& drive, double omega_l) {
  Eigen::MatrixXcd h = blocks.full;
  h.diagonal().array() -= omega_l;
  double backward = 0.0;
  Eigen::VectorXcd sigma = solve_checked(h, drive, &backward);
  if (backward > 1e-10)
    throw numerical_failure("steady_state: solve residual " +
                            std::to_string(backward));
  return sigma;
}

Eigen::Vector3cd scattered_field(
    const Eigen::VectorXcd& amplitudes, const DipoleSet& layout,
    const Eigen::Vector3d& r,
    const std::function<Eigen::Vector3cd(const Eigen::Vector3d&)>& incident) {
  if (amplitudes.size() != layout.total())
    throw std::invalid_argument("scattered_field: amplitude count mismatch");
  Eigen::Vector3cd field = incident ? incident(r) : Eigen::Vector3cd::Zero().eval();
  for (int i = 0; i < layout.total(); ++i) {
    const Dipole& d = layout.atom(i);
    if ((r - d.position).norm() <= 1e-9)
      throw std::domain_error("scattered_field: observation point on an atom");
    field += (3.0 * pi / k0) * std::sqrt(d.linewidth) * amplitudes[i] *
             (greens_dyadic(r - d.position) * d.orientation);
  }
  return field;
}

namespace {

struct PlaneQuadrature {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
};

PlaneQuadrature tensor_trapezoid(double z, double half_width, int n) {
  PlaneQuadrature q;
  q.points.reserve(static_cast<std::size_t>(n) * n);
  q.weights.reserve(static_cast<std::size_t>(n) * n);
  const double step = 2.0 * half_width / (n - 1);
  for (int iy = 0; iy < n; ++iy) {
    const double wy = (iy == 0 || iy == n - 1) ? 0.5 : 1.0;
    for (int ix = 0; ix < n; ++ix) {
      const double wx = (ix == 0 || ix == n - 1) ? 0.5 : 1.0;
      q.points.emplace_back(-half_width + step * ix, -half_width + step * iy, z);
      q.weights.push_back(wx * wy * step * step);
    }
  }
  return q;
}

// Projection weights of the per-atom radiated field onto a detection mode on
// one transverse plane: w_i = sum_pts weight conj/plain(mode) . G(pt, r_i) e_i.
// `conjugate` selects the forward (conjugated) or retro (plain) pairing.
Eigen::VectorXcd atom_plane_weights(const DipoleSet& layout,
                                    const GaussianBeam& beam,
                                    const PlaneQuadrature& quad, bool conjugate,
                                    int threads) {
  const int n = layout.total();
  Eigen::VectorXcd weights = Eigen::VectorXcd::Zero(n);
  parallel_for(
      static_cast<std::size_t>(n),
      [&](std::size_t i) {
        const Dipole& d = layout.atom(static_cast<int>(i));
        cdouble acc = 0.0;
        for (std::size_t p = 0; p < quad.points.size(); ++p) {
          Eigen::Vector3cd mode = gaussian_mode_field(beam, quad.points[p]);
          if (conjugate) mode = mode.conjugate();
          Eigen::Vector3cd rad = greens_dyadic(quad.points[p] - d.position) *
                                 d.orientation;
          acc += quad.weights[p] * (mode.transpose() * rad)(0, 0);
        }
        weights[static_cast<int>(i)] = std::sqrt(d.linewidth) * acc;
      },
      threads);
  return weights;
}

cdouble incident_mode_overlap(const GaussianBeam& beam,
                              const PlaneQuadrature& quad) {
  cdouble acc = 0.0;
  for (std::size_t p = 0; p < quad.points.size(); ++p) {
    Eigen::Vector3cd mode = gaussian_mode_field(beam, quad.points[p]);
    acc += quad.weights[p] * (mode.conjugate().transpose() * mode)(0, 0);
  }
  return acc;
}

}  // namespace

ModeProjector::ModeProjector(const DipoleSet& layout, const GaussianBeam& beam,
                             double plane_offset, double tolerance, int threads) {
  double z_extent = 0.0;
  for (int i = 0; i < layout.total(); ++i)
    z_extent = std::max(z_extent, std::abs(layout.atom(i).position.z()));
  const double z_t = -(z_extent + plane_offset);  // transmission side (-z)
  const double z_r = +(z_extent + plane_offset);  // reflection side

  int n_grid = 65;
  Eigen::VectorXcd wt_prev, wr_prev;
  cdouble inc_prev{};
  for (int pass = 0;; ++pass) {
    PlaneQuadrature quad_t =
        tensor_trapezoid(z_t, 3.0 * beam.width(z_t), n_grid);
    PlaneQuadrature quad_r =
        tensor_trapezoid(z_r, 3.0 * beam.width(z_r), n_grid);
    weights_t_ = atom_plane_weights(layout, beam, quad_t, true, threads);
    weights_r_ = atom_plane_weights(layout, beam, quad_r, false, threads);
    incident_overlap_ = incident_mode_overlap(beam, quad_t);
    if (pass > 0) {
      double err = std::max((weights_t_ - wt_prev).cwiseAbs().maxCoeff(),
                            (weights_r_ - wr_prev).cwiseAbs().maxCoeff());
      err = std::max(err, std::abs(incident_overlap_ - inc_prev));
      quadrature_error_ = err;
      if (err < tolerance) return;
      if (n_grid >= 513)
        throw numerical_failure(
            "ModeProjector: overlap quadrature did not converge, err=" +
            std::to_string(err));
    }
    wt_prev = weights_t_;
    wr_prev = weights_r_;
    inc_prev = incident_overlap_;
    n_grid = 2 * n_grid - 1;
  }
}

ScatterCoefficients ModeProjector::project(
    const Eigen::VectorXcd& amplitudes) const {
  ScatterCoefficients out;
  cdouble t_sc = 0.0, r_sc = 0.0;
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
    t_sc += weights_t_[i] * amplitudes[i];
    r_sc += weights_r_[i] * amplitudes[i];
  }
  out.t = incident_overlap_ + (3.0 * pi / k0) * t_sc;
  out.r = (3.0 * pi / k0) * r_sc;
  return out;
}

ScatterCoefficients mirror_coefficients(const DipoleSet& mirror,
                                        const GaussianBeam& beam, double delta,
                                        int threads) {
  BlockHamiltonian blocks = assemble_hamiltonian(mirror, {}, threads);
  ModeProjector projector(mirror, beam, 5.0, 1e-6, threads);
  Eigen::VectorXcd drive = drive_vector(mirror, beam, 1.0);
  Eigen::VectorXcd sigma = steady_state(blocks, drive, delta);
  return projector.project(sigma);
}

CavitySpectrum cavity_transmission_spectrum(const DipoleSet& cavity,
                                            const GaussianBeam& beam,
                                            const Eigen::VectorXd& omega_grid,
                                            int threads) {
  BlockHamiltonian blocks = assemble_hamiltonian(cavity, {}, threads);
  ModeProjector projector(cavity, beam, 5.0, 1e-6, threads);
  Eigen::VectorXcd drive = drive_vector(cavity, beam, 1.0);

  CavitySpectrum out;
  out.omega = omega_grid;
  out.transmission.resize(omega_grid.size());
  out.reflection.resize(omega_grid.size());
  out.loss.resize(omega_grid.size());
  parallel_for(
      static_cast<std::size_t>(omega_grid.size()),
      [&](std::size_t i) {
        Eigen::VectorXcd sigma = steady_state(blocks, drive, omega_grid[i]);
        ScatterCoefficients c = projector.project(sigma);
        out.transmission[i] = c.transmission();
        out.reflection[i] = c.reflection();
        out.loss[i] = c.scattering_loss();
      },
      threads);
  return out;
}

Eigen::VectorXd fabry_perot(const AmplitudeResponse& r_fn,
                            const AmplitudeResponse& t_fn, double length,
                            const Eigen::VectorXd& omega_grid,
                            double quality_factor) {
  Eigen::VectorXd out(omega_grid.size());
  for (Eigen::Index i = 0; i < omega_grid.size(); ++i) {
    const double w = omega_grid[i];
    const cdouble r = r_fn(w), t = t_fn(w);
    const double phase = 2.0 * k0 * length * (1.0 + w / quality_factor);
    const cdouble denom = 1.0 - r * r * std::exp(cdouble(0.0, phase));
    out[i] = std::norm(t * t / denom);
  }
  return out;
}

Eigen::VectorXd far_field_pattern(const Eigen::VectorXcd& mode_amplitudes,
                                  const DipoleSet& layout,
                                  const Eigen::VectorXd& theta_grid,
                                  int n_azimuthal, double radius) {
  if (mode_amplitudes.size() != layout.total() &&
      mode_amplitudes.size() != layout.n_array())
    throw std::invalid_argument("far_field_pattern: amplitude count mismatch");
  Eigen::VectorXcd weighted = Eigen::VectorXcd::Zero(layout.total());
  weighted.head(mode_amplitudes.size()) = mode_amplitudes;
  Eigen::VectorXd intensity(theta_grid.size());
  parallel_for(static_cast<std::size_t>(theta_grid.size()), [&](std::size_t it) {
    const double theta = theta_grid[static_cast<Eigen::Index>(it)];
    double acc = 0.0;
    for (int ip = 0; ip < n_azimuthal; ++ip) {
      const double phi = 2.0 * pi * ip / n_azimuthal;
      // polar angle from the -z (output) axis
      Eigen::Vector3d dir(std::sin(theta) * std::cos(phi),
                          std::sin(theta) * std::sin(phi), -std::cos(theta));
      Eigen::Vector3cd field =
          scattered_field(weighted, layout, radius * dir);
      acc += field.squaredNorm();
    }
    intensity[static_cast<Eigen::Index>(it)] = acc / n_azimuthal;
  });
  return intensity;
}

}  // namespace arraycav
