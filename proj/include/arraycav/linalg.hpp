#pragma once

#include <Eigen/Dense>
#include <vector>

#include "arraycav/common.hpp"

namespace arraycav {

struct EigResult {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // right eigenvectors as columns
};

// Full eigendecomposition of a dense complex matrix (LAPACK zgeev).
EigResult eig_dense(const Eigen::MatrixXcd& a);

// Dense LU factorization with factor reuse (LAPACK zgetrf/zgetrs).
class DenseLU {
 public:
  explicit DenseLU(Eigen::MatrixXcd a);
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& b) const;
  bool singular() const { return singular_; }

 private:
  Eigen::MatrixXcd lu_;
  std::vector<int> ipiv_;
  bool singular_ = false;
};

// Solves a x = b with one step of iterative refinement. The optional output
// is the normwise backward error |a x - b| / (|a|_F |x| + |b|).
Eigen::VectorXcd solve_checked(const Eigen::MatrixXcd& a,
                               const Eigen::VectorXcd& b,
                               double* backward_error = nullptr);

// Repeated shifted solves u^T (w I - H)^{-1} v through one Hessenberg
// factorization H = Q T Q^H; each evaluation is O(n^2) (Givens QR of the
// shifted Hessenberg matrix plus back substitution).
class HessenbergResolvent {
 public:
  HessenbergResolvent(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& u,
                      const Eigen::VectorXcd& v);
  cdouble operator()(double omega) const;

 private:
  Eigen::MatrixXcd t_;      // upper Hessenberg
  Eigen::VectorXcd u_row_;  // u^T Q
  Eigen::VectorXcd v_col_;  // Q^H v
};

struct TrackedMode {
  cdouble lambda{};
  Eigen::VectorXcd vector;  // unit 2-norm
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // |h v - lambda v| / |h|_F
};

// Shifted inverse iteration toward the eigenpair nearest `shift`, seeded with
// v0. One LU of (h - shift I) is reused across iterations.
TrackedMode inverse_iterate(const Eigen::MatrixXcd& h, cdouble shift,
                            const Eigen::VectorXcd& v0, int max_iter = 60,
                            double tol = 1e-9);

}  // namespace arraycav
