#include "arraycav/linalg.hpp"

#include <complex>

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

namespace arraycav {

EigResult eig_dense(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eig_dense: matrix not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EigResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  Eigen::MatrixXcd work = a;  // zgeev overwrites its input
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n,
                                  out.values.data(), nullptr, n,
                                  out.vectors.data(), n);
  if (info != 0)
    throw numerical_failure("zgeev failed, info=" + std::to_string(info));
  return out;
}

DenseLU::DenseLU(Eigen::MatrixXcd a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw std::invalid_argument("DenseLU: matrix not square");
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  ipiv_.resize(n);
  lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, ipiv_.data());
  if (info < 0)
    throw numerical_failure("zgetrf failed, info=" + std::to_string(info));
  singular_ = info > 0;
}

Eigen::VectorXcd DenseLU::solve(const Eigen::VectorXcd& b) const {
  if (singular_) throw numerical_failure("DenseLU::solve: exactly singular factorization");
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  Eigen::VectorXcd x = b;
  lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lu_.data(), n,
                                   ipiv_.data(), x.data(), n);
  if (info != 0)
    throw numerical_failure("zgetrs failed, info=" + std::to_string(info));
  return x;
}

Eigen::MatrixXcd DenseLU::solve(const Eigen::MatrixXcd& b) const {
  if (singular_) throw numerical_failure("DenseLU::solve: exactly singular factorization");
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  Eigen::MatrixXcd x = b;
  lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n,
                                   static_cast<lapack_int>(b.cols()), lu_.data(), n,
                                   ipiv_.data(), x.data(), n);
  if (info != 0)
    throw numerical_failure("zgetrs failed, info=" + std::to_string(info));
  return x;
}

Eigen::VectorXcd solve_checked(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b,
                               double* backward_error) {
  DenseLU lu(a);
  Eigen::VectorXcd x = lu.solve(b);
  Eigen::VectorXcd r = b - a * x;
  x += lu.solve(r);  // one refinement step
  r = b - a * x;
  if (backward_error) {
    double denom = a.norm() * x.norm() + b.norm();
    *backward_error = denom > 0 ? r.norm() / denom : 0.0;
  }
  return x;
}

HessenbergResolvent::HessenbergResolvent(const Eigen::MatrixXcd& h,
                                         const Eigen::VectorXcd& u,
                                         const Eigen::VectorXcd& v) {
  if (h.rows() != h.cols() || u.size() != h.rows() || v.size() != h.rows())
    throw std::invalid_argument("HessenbergResolvent: dimension mismatch");
  const lapack_int n = static_cast<lapack_int>(h.rows());
  t_ = h;
  std::vector<cdouble> tau(std::max<lapack_int>(1, n - 1));
  lapack_int info =
      LAPACKE_zgehrd(LAPACK_COL_MAJOR, n, 1, n, t_.data(), n, tau.data());
  if (info != 0)
    throw numerical_failure("zgehrd failed, info=" + std::to_string(info));
  Eigen::MatrixXcd q = t_;
  info = LAPACKE_zunghr(LAPACK_COL_MAJOR, n, 1, n, q.data(), n, tau.data());
  if (info != 0)
    throw numerical_failure("zunghr failed, info=" + std::to_string(info));
  // zero the reflector storage below the subdiagonal
  for (lapack_int j = 0; j + 2 < n; ++j)
    for (lapack_int i = j + 2; i < n; ++i) t_(i, j) = 0.0;
  u_row_ = q.transpose() * u;
  v_col_ = q.adjoint() * v;
}

cdouble HessenbergResolvent::operator()(double omega) const {
  const Eigen::Index n = t_.rows();
  // r = omega I - T, then Givens QR and back substitution
  Eigen::MatrixXcd r = -t_;
  r.diagonal().array() += omega;
  Eigen::VectorXcd rhs = v_col_;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const cdouble a = r(i, i), b = r(i + 1, i);
    const double den = std::sqrt(std::norm(a) + std::norm(b));
    if (den == 0.0) continue;
    const cdouble ca = std::conj(a) / den, cb = std::conj(b) / den;
    // rows i and i+1, columns i..min(i+2, n-1) are the only nonzeros ahead;
    // Givens mixing fills one extra superdiagonal per step, so sweep to the
    // end of both rows
    for (Eigen::Index j = i; j < n; ++j) {
      const cdouble top = r(i, j), bottom = r(i + 1, j);
      r(i, j) = ca * top + cb * bottom;
      r(i + 1, j) = -b * top / den + a * bottom / den;
    }
    const cdouble top = rhs[i], bottom = rhs[i + 1];
    rhs[i] = ca * top + cb * bottom;
    rhs[i + 1] = -b * top / den + a * bottom / den;
  }
  // back substitution on the (now upper triangular) system
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    cdouble acc = rhs[i];
    for (Eigen::Index j = i + 1; j < n; ++j) acc -= r(i, j) * rhs[j];
    const cdouble pivot = r(i, i);
    if (pivot == cdouble(0.0, 0.0))
      throw numerical_failure("HessenbergResolvent: singular shift");
    rhs[i] = acc / pivot;
  }
  return (u_row_.transpose() * rhs)(0, 0);
}

TrackedMode inverse_iterate(const Eigen::MatrixXcd& h, cdouble shift,
                            const Eigen::VectorXcd& v0, int max_iter, double tol) {
  const double h_norm = h.norm();
  Eigen::MatrixXcd shifted = h;
  shifted.diagonal().array() -= shift;
  DenseLU lu(shifted);
  if (lu.singular()) {
    // shift landed exactly on an eigenvalue; nudge it
    shifted.diagonal().array() -= cdouble(1e-9, 0.0);
    lu = DenseLU(shifted);
  }

  TrackedMode mode;
  Eigen::VectorXcd v = v0.normalized();
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXcd w = lu.solve(v);
    v = w.normalized();
    // Rayleigh quotient in the ordinary inner product
    cdouble lambda = v.dot(h * v);
    double res = (h * v - lambda * v).norm() / h_norm;
    mode.lambda = lambda;
    mode.vector = v;
    mode.iterations = it;
    mode.residual = res;
    if (res < tol) {
      mode.converged = true;
      return mode;
    }
  }
  return mode;
}

}  // namespace arraycav
