#include "arraycav/interaction.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "arraycav/parallel.hpp"

namespace arraycav {

Eigen::Matrix3cd greens_dyadic(const Eigen::Vector3d& rvec) {
  const double r = rvec.norm();
  if (!(r > 0.0)) throw std::domain_error("greens_dyadic: zero separation");
  const double kr = k0 * r;
  const cdouble ikr(0.0, kr);
  const cdouble prefactor = std::exp(ikr) / (4.0 * pi * r);
  const cdouble a = 1.0 + (ikr - 1.0) / (kr * kr);
  const cdouble b = -1.0 + (3.0 - 3.0 * ikr) / (kr * kr);
  const Eigen::Matrix3d projector = rvec * rvec.transpose() / (r * r);
  return prefactor *
         (a * Eigen::Matrix3cd::Identity() + b * projector.cast<cdouble>());
}

cdouble coupling_coefficient(const Dipole& di, const Dipole& dj) {
  const Eigen::Vector3d dr = di.position - dj.position;
  if (dr.norm() <= 1e-9)
    throw std::domain_error("coupling_coefficient: coincident positions");
  const Eigen::Matrix3cd g = greens_dyadic(dr);
  const cdouble projected = (di.orientation.adjoint() * g * dj.orientation)(0, 0);
  return -(3.0 * pi / k0) * std::sqrt(di.linewidth * dj.linewidth) * projected;
}

BlockHamiltonian assemble_hamiltonian(const DipoleSet& layout,
                                      std::optional<double> fast_motion_sigma,
                                      int threads) {
  layout.validate();
  double sigma = 0.0;
  if (fast_motion_sigma) {
    if (*fast_motion_sigma < 0.0)
      throw std::invalid_argument("assemble_hamiltonian: sigma must be >= 0");
    sigma = *fast_motion_sigma;
  }
  const double coupling_scale = std::exp(-k0 * k0 * sigma * sigma);

  const int n = layout.total();
  BlockHamiltonian h;
  h.full.resize(n, n);
  h.n_array = layout.n_array();
  h.n_target = layout.n_target();
  h.motion_sigma = sigma;
  h.drive_rescale = std::exp(-0.5 * k0 * k0 * sigma * sigma);

  parallel_for(
      static_cast<std::size_t>(n),
      [&](std::size_t i) {
        const Dipole& di = layout.atom(static_cast<int>(i));
        for (int j = 0; j < n; ++j) {
          if (static_cast<int>(i) == j) {
            h.full(i, j) = cdouble(di.detuning, -0.5 * di.linewidth);
          } else {
            h.full(i, j) =
                coupling_scale * coupling_coefficient(di, layout.atom(j));
          }
        }
      },
      threads);
  return h;
}

Eigen::VectorXcd drive_vector(const DipoleSet& layout, const GaussianBeam& beam,
                              cdouble amplitude, double rescale) {
  const int n = layout.total();
  Eigen::VectorXcd omega(n);
  for (int i = 0; i < n; ++i) {
    const Dipole& d = layout.atom(i);
    const Eigen::Vector3cd field = gaussian_mode_field(beam, d.position);
    omega[i] = amplitude * rescale * std::sqrt(d.linewidth) *
               (d.orientation.adjoint() * field)(0, 0);
  }
  return omega;
}

namespace {
constexpr std::uint64_t kMagic = 0x314d414856414341ull;  // "ACAVHAM1"
constexpr std::uint64_t kVersion = 1;
}  // namespace

void write_hamiltonian_dump(const std::string& path, const BlockHamiltonian& h,
                            const DipoleSet& layout) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_hamiltonian_dump: cannot open " + path);
  auto put_u64 = [&](std::uint64_t v) { std::fwrite(&v, sizeof v, 1, f); };
  auto put_f64 = [&](double v) { std::fwrite(&v, sizeof v, 1, f); };
  put_u64(kMagic);
  put_u64(kVersion);
  put_u64(static_cast<std::uint64_t>(h.n_array));
  put_u64(static_cast<std::uint64_t>(h.n_target));
  put_f64(layout.a);
  put_f64(layout.length);
  put_f64(layout.waist.value_or(0.0));
  put_f64(h.motion_sigma);
  const int n = h.n_array + h.n_target;
  std::vector<float> row(2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      row[2 * j] = static_cast<float>(h.full(i, j).real());
      row[2 * j + 1] = static_cast<float>(h.full(i, j).imag());
    }
    std::fwrite(row.data(), sizeof(float), row.size(), f);
  }
  std::fclose(f);
}

BlockHamiltonian read_hamiltonian_dump(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("read_hamiltonian_dump: cannot open " + path);
  auto get_u64 = [&] {
    std::uint64_t v = 0;
    if (std::fread(&v, sizeof v, 1, f) != 1)
      throw std::runtime_error("read_hamiltonian_dump: truncated header");
    return v;
  };
  auto get_f64 = [&] {
    double v = 0;
    if (std::fread(&v, sizeof v, 1, f) != 1)
      throw std::runtime_error("read_hamiltonian_dump: truncated header");
    return v;
  };
  if (get_u64() != kMagic) {
    std::fclose(f);
    throw std::runtime_error("read_hamiltonian_dump: bad magic");
  }
  if (get_u64() != kVersion) {
    std::fclose(f);
    throw std::runtime_error("read_hamiltonian_dump: unsupported version");
  }
  BlockHamiltonian h;
  h.n_array = static_cast<int>(get_u64());
  h.n_target = static_cast<int>(get_u64());
  get_f64();  // a
  get_f64();  // L
  get_f64();  // w0
  h.motion_sigma = get_f64();
  h.drive_rescale = std::exp(-0.5 * k0 * k0 * h.motion_sigma * h.motion_sigma);
  const int n = h.n_array + h.n_target;
  h.full.resize(n, n);
  std::vector<float> row(2 * n);
  for (int i = 0; i < n; ++i) {
    if (std::fread(row.data(), sizeof(float), row.size(), f) != row.size()) {
      std::fclose(f);
      throw std::runtime_error("read_hamiltonian_dump: truncated data");
    }
    for (int j = 0; j < n; ++j) h.full(i, j) = cdouble(row[2 * j], row[2 * j + 1]);
  }
  std::fclose(f);
  return h;
}

}  // namespace arraycav
