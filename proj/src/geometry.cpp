#include "arraycav/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace arraycav {

void Dipole::validate() const {
  double norm2 = orientation.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-12)
    throw std::invalid_argument("Dipole: orientation must have unit norm");
  if (!(linewidth > 0.0))
    throw std::invalid_argument("Dipole: linewidth must be positive");
}

void DipoleSet::validate() const {
  for (const auto& d : array_atoms) d.validate();
  for (const auto& d : target_atoms) d.validate();
  const int n = total();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((atom(i).position - atom(j).position).norm() <= 1e-9)
        throw std::domain_error("DipoleSet: atoms " + std::to_string(i) + " and " +
                                std::to_string(j) + " coincide");
}

Eigen::Vector3cd gaussian_mode_field(const GaussianBeam& beam,
                                     const Eigen::Vector3d& r) {
  const double z = r.z();
  const double rho2 = r.x() * r.x() + r.y() * r.y();
  const double w = beam.width(z);
  const double amp = std::sqrt(2.0 / pi) / w * std::exp(-rho2 / (w * w));
  const double phase =
      -(k0 * z + 0.5 * k0 * rho2 * beam.inverse_curvature(z) - beam.gouy_phase(z));
  return beam.polarization.cast<cdouble>() * (amp * std::exp(cdouble(0.0, phase)));
}

std::vector<Dipole> build_square_array(int n, double a, double z_plane,
                                       const Eigen::Vector3cd& orientation) {
  if (n < 1) throw std::invalid_argument("build_square_array: N must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("build_square_array: a must be > 0");
  std::vector<Dipole> atoms;
  atoms.reserve(static_cast<std::size_t>(n) * n);
  const double offset = 0.5 * (n - 1) * a;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      Dipole d;
      d.position = Eigen::Vector3d(ix * a - offset, iy * a - offset, z_plane);
      d.orientation = orientation;
      atoms.push_back(d);
    }
  return atoms;
}

namespace {

// Phase mismatch of the +z mirror atom at transverse radius^2 rho2.
double phase_residual(double z, double rho2, const GaussianBeam& beam, double L) {
  return k0 * z + 0.5 * k0 * rho2 * beam.inverse_curvature(z) -
         beam.gouy_phase(z) - 0.5 * k0 * L;
}

double phase_residual_deriv(double z, double rho2, const GaussianBeam& beam) {
  const double zr = beam.rayleigh_range();
  const double denom = z * z + zr * zr;
  const double dinv_r = (zr * zr - z * z) / (denom * denom);
  const double dpsi = zr / denom;
  return k0 + 0.5 * k0 * rho2 * dinv_r - dpsi;
}

}  // namespace

std::vector<Dipole> curve_mirror(std::vector<Dipole> flat, double w0, double L) {
  if (!(w0 > 0.0)) throw std::invalid_argument("curve_mirror: w0 must be > 0");
  if (!(L > 0.0)) throw std::invalid_argument("curve_mirror: L must be > 0");
  GaussianBeam beam;
  beam.waist = w0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    Dipole& d = flat[i];
    if (std::abs(std::abs(d.position.z()) - 0.5 * L) > 1e-9)
      throw std::invalid_argument("curve_mirror: atom " + std::to_string(i) +
                                  " not in plane z = +-L/2");
    const double sign = d.position.z() >= 0.0 ? 1.0 : -1.0;
    const double rho2 =
        d.position.x() * d.position.x() + d.position.y() * d.position.y();
    double z = 0.5 * L;  // displacements are small in all regimes of interest
    double f = phase_residual(z, rho2, beam, L);
    bool done = std::abs(f) < 1e-12;
    for (int it = 0; it < 100 && !done; ++it) {
      double step = f / phase_residual_deriv(z, rho2, beam);
      double damping = 1.0;
      for (int half = 0; half < 40; ++half) {
        double z_new = z - damping * step;
        double f_new = phase_residual(z_new, rho2, beam, L);
        if (std::abs(f_new) < std::abs(f)) {
          z = z_new;
          f = f_new;
          break;
        }
        damping *= 0.5;
      }
      done = std::abs(f) < 1e-12;
    }
    if (!done)
      throw numerical_failure("curve_mirror: Newton did not converge for atom " +
                              std::to_string(i));
    d.position.z() = sign * z;
  }
  return flat;
}

std::vector<Dipole> stark_detuning_profile(std::vector<Dipole> flat, double alpha,
                                           double w_stark) {
  if (!(w_stark > 0.0))
    throw std::invalid_argument("stark_detuning_profile: w_stark must be > 0");
  for (Dipole& d : flat) {
    const double r2 = d.position.x() * d.position.x() + d.position.y() * d.position.y();
    d.detuning += alpha * (1.0 - std::exp(-2.0 * r2 / (w_stark * w_stark)));
  }
  return flat;
}

DipoleSet sample_frozen_disorder(const DipoleSet& ideal, const Eigen::Vector3d& sigma,
                                 std::uint64_t seed, bool displace_targets) {
  for (int axis = 0; axis < 3; ++axis)
    if (sigma[axis] < 0.0)
      throw std::invalid_argument("sample_frozen_disorder: sigma must be >= 0");
  DipoleSet out = ideal;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto displace = [&](Dipole& d) {
    for (int axis = 0; axis < 3; ++axis) d.position[axis] += sigma[axis] * gauss(rng);
  };
  for (Dipole& d : out.array_atoms) displace(d);
  if (displace_targets)
    for (Dipole& d : out.target_atoms) displace(d);
  return out;
}

DipoleSet make_cavity(int n, double a, double L, std::optional<double> w0,
                      std::vector<Dipole> targets, std::optional<StarkProfile> stark,
                      const Eigen::Vector3cd& orientation) {
  if (!(L > 0.0)) throw std::invalid_argument("make_cavity: L must be > 0");
  auto mirror1 = build_square_array(n, a, -0.5 * L, orientation);
  auto mirror2 = build_square_array(n, a, +0.5 * L, orientation);
  if (w0) {
    mirror1 = curve_mirror(std::move(mirror1), *w0, L);
    mirror2 = curve_mirror(std::move(mirror2), *w0, L);
  }
  if (stark) {
    mirror1 = stark_detuning_profile(std::move(mirror1), stark->alpha, stark->w_stark);
    mirror2 = stark_detuning_profile(std::move(mirror2), stark->alpha, stark->w_stark);
  }
  DipoleSet set;
  set.array_atoms = std::move(mirror1);
  set.array_atoms.insert(set.array_atoms.end(), mirror2.begin(), mirror2.end());
  set.target_atoms = std::move(targets);
  set.a = a;
  set.n_side = n;
  set.length = L;
  set.waist = w0;
  set.validate();
  return set;
}

DipoleSet make_single_mirror(int n, double a, double L, std::optional<double> w0,
                             const Eigen::Vector3cd& orientation) {
  if (w0 && !(L > 0.0))
    throw std::invalid_argument("make_single_mirror: curved mirror needs L > 0");
  auto mirror = build_square_array(n, a, 0.5 * L, orientation);
  if (w0) mirror = curve_mirror(std::move(mirror), *w0, L);
  DipoleSet set;
  set.array_atoms = std::move(mirror);
  set.a = a;
  set.n_side = n;
  set.length = L;
  set.waist = w0;
  set.validate();
  return set;
}

Dipole make_target(const Eigen::Vector3d& position, double gamma_a, double detuning,
                   const Eigen::Vector3cd& orientation) {
  Dipole d;
  d.position = position;
  d.orientation = orientation;
  d.detuning = detuning;
  d.linewidth = gamma_a;
  d.validate();
  return d;
}

void write_layout_csv(const std::string& path, const DipoleSet& layout) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_layout_csv: cannot open " + path);
  std::fprintf(f,
               "index,x,y,z,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im,detuning,linewidth,kind\n");
  for (int i = 0; i < layout.total(); ++i) {
    const Dipole& d = layout.atom(i);
    std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                 i, d.position.x(), d.position.y(), d.position.z(),
                 d.orientation.x().real(), d.orientation.x().imag(),
                 d.orientation.y().real(), d.orientation.y().imag(),
                 d.orientation.z().real(), d.orientation.z().imag(), d.detuning,
                 d.linewidth, i < layout.n_array() ? "array" : "target");
  }
  std::fclose(f);
}

}  // namespace arraycav
