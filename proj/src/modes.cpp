#include "arraycav/modes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "arraycav/linalg.hpp"

namespace arraycav {

namespace {

// Bilinear (unconjugated) inner product, the natural pairing for a
// complex-symmetric matrix.
cdouble bilinear(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  return (u.transpose() * v)(0, 0);
}

// Within clusters of (near-)degenerate eigenvalues the raw zgeev vectors need
// not be bilinear-orthogonal; Gram-Schmidt in the bilinear form fixes that
// while staying inside the degenerate eigenspace.
void orthogonalize_clusters(Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors,
                            double scale) {
  const int n = static_cast<int>(values.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return values[a].real() < values[b].real();
  });
  const double tol = 1e-12 * scale;
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n &&
           std::abs(values[order[end]] - values[order[end - 1]]) < tol)
      ++end;
    for (int i = start + 1; i < end; ++i) {
      auto vi = vectors.col(order[i]);
      for (int j = start; j < i; ++j) {
        auto vj = vectors.col(order[j]);
        cdouble denom = bilinear(vj, vj);
        if (std::abs(denom) < 1e-14) continue;
        vi -= (bilinear(vj, vi) / denom) * vj;
      }
    }
    start = end;
  }
}

}  // namespace

EigenmodeSet eigenmodes(const Eigen::MatrixXcd& h_aa) {
  if (h_aa.rows() != h_aa.cols())
    throw std::invalid_argument("eigenmodes: matrix not square");
  EigResult eig = eig_dense(h_aa);
  const double h_norm = h_aa.norm();
  orthogonalize_clusters(eig.values, eig.vectors, h_norm / std::sqrt((double)h_aa.rows()));

  const int n = static_cast<int>(eig.values.size());
  for (int m = 0; m < n; ++m) {
    auto v = eig.vectors.col(m);
    cdouble s = bilinear(v, v);
    if (std::abs(s) < 1e-10)
      throw numerical_failure(
          "eigenmodes: quasi-null bilinear norm, mode " + std::to_string(m));
    v /= std::sqrt(s);
    double residual = (h_aa * v - eig.values[m] * v).norm() / (h_norm * v.norm());
    if (residual > 1e-8)
      throw numerical_failure("eigenmodes: residual " + std::to_string(residual) +
                              " for mode " + std::to_string(m));
  }
  return EigenmodeSet{std::move(eig.values), std::move(eig.vectors)};
}

Eigen::VectorXcd couple_strengths(const EigenmodeSet& modes,
                                  const Eigen::VectorXcd& h_ta,
                                  const Eigen::VectorXcd& h_at) {
  if (h_ta.size() != modes.right.rows() || h_at.size() != modes.right.rows())
    throw std::invalid_argument("couple_strengths: dimension mismatch");
  const int n = modes.size();
  Eigen::VectorXcd g2(n);
  Eigen::VectorXcd ta_v = modes.right.transpose() * h_ta;  // h_ta . v_R,n
  Eigen::VectorXcd v_at = modes.right.transpose() * h_at;  // v_L,n . h_at
  for (int m = 0; m < n; ++m) g2[m] = ta_v[m] * v_at[m];
  return g2;
}

int identify_cavity_mode(const EigenmodeSet& modes, const Eigen::VectorXcd& g2) {
  const int n = modes.size();
  if (n == 0) throw std::invalid_argument("identify_cavity_mode: empty mode set");
  int best = -1;
  double best_score = 0.0;
  for (int m = 0; m < n; ++m) {
    double kappa = std::max(modes.kappa(m), 1e-300);
    double score = g2[m].real() / kappa;
    if (best < 0) {
      best = m;
      best_score = score;
      continue;
    }
    double tie_band = 1e-9 * std::max(std::abs(score), std::abs(best_score));
    if (score > best_score + tie_band ||
        (std::abs(score - best_score) <= tie_band &&
         modes.kappa(m) < modes.kappa(best))) {
      best = m;
      best_score = score;
    }
  }
  return best;
}

int identify_fundamental_by_overlap(const EigenmodeSet& modes,
                                    const DipoleSet& layout,
                                    const GaussianBeam& beam) {
  const int na = layout.n_array();
  if (modes.right.rows() != na)
    throw std::invalid_argument("identify_fundamental_by_overlap: size mismatch");
  Eigen::VectorXcd mode_field(na);
  for (int i = 0; i < na; ++i) {
    const Dipole& d = layout.array_atoms[i];
    mode_field[i] =
        (d.orientation.adjoint() * gaussian_mode_field(beam, d.position))(0, 0);
  }
  const bool two_mirrors = na == 2 * layout.n_side * layout.n_side;
  const int per_mirror = two_mirrors ? na / 2 : na;
  int best = 0;
  double best_score = -1.0;
  for (int m = 0; m < modes.size(); ++m) {
    auto v = modes.right.col(m);
    double score = 0.0;
    // per-mirror projections; the relative sign between mirrors is free
    for (int lo = 0; lo < na; lo += per_mirror) {
      int len = std::min(per_mirror, na - lo);
      cdouble overlap = mode_field.segment(lo, len)
                            .conjugate()
                            .cwiseProduct(v.segment(lo, len))
                            .sum();
      double norm2 = v.segment(lo, len).squaredNorm() *
                     mode_field.segment(lo, len).squaredNorm();
      if (norm2 > 0) score += std::norm(overlap) / norm2;
    }
    if (score > best_score) {
      best_score = score;
      best = m;
    }
  }
  return best;
}

double mode_splitting(double gamma0_collective, double L, double r_curvature,
                      int order) {
  const double arg = 1.0 - L / r_curvature;
  if (!(arg > -1.0 && arg < 1.0))
    throw std::domain_error("mode_splitting: requires 0 < L < 2 R");
  return 0.5 * gamma0_collective * std::tan(order * std::acos(arg));
}

CavityParams make_cavity_params(cdouble lambda_c, cdouble g2, double gamma_3d,
                                int mode_index, bool gamma_unreliable) {
  CavityParams p;
  p.omega_c = lambda_c.real();
  p.kappa = -2.0 * lambda_c.imag();
  p.g2 = g2;
  p.g = std::sqrt(std::max(g2.real(), 0.0));
  p.gamma_3d = gamma_3d;
  p.mode_index = mode_index;
  p.gamma_3d_unreliable = gamma_unreliable;
  p.cooperativity = 4.0 * p.g * p.g / (p.kappa * gamma_3d);
  return p;
}

void write_modes_csv(const std::string& path, const EigenmodeSet& modes,
                     const Eigen::VectorXcd& g2) {
  std::vector<int> order(modes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return g2[a].real() / std::max(modes.kappa(a), 1e-300) >
           g2[b].real() / std::max(modes.kappa(b), 1e-300);
  });
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_modes_csv: cannot open " + path);
  std::fprintf(f, "re_lambda,im_lambda,re_g2,im_g2,g2_over_kappa\n");
  for (int m : order) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", modes.eigenvalues[m].real(),
                 modes.eigenvalues[m].imag(), g2[m].real(), g2[m].imag(),
                 g2[m].real() / std::max(modes.kappa(m), 1e-300));
  }
  std::fclose(f);
}

}  // namespace arraycav
