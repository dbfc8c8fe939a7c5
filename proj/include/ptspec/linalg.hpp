#pragma once

#include <Eigen/Dense>
#include <complex>

#include "ptspec/errors.hpp"

// Dense kernels shared by every module: eigensolvers, linear solves,
// operator norms. Deterministic outputs, eigenvalues ordered by real
// part with ties broken by imaginary part.

namespace ptspec::linalg {

struct SpectralDecomposition {
  Eigen::VectorXcd eigenvalues;   // sorted (re, im)
  Eigen::MatrixXcd eigenvectors;  // unit-norm columns
  Eigen::VectorXd residuals;      // ||A v - lambda v|| per pair

  Eigen::VectorXd real_eigenvalues() const { return eigenvalues.real(); }
};

// Real-symmetric eigensolve; eigenvalues ascending, orthonormal
// eigenvectors, residuals <= 1e-12 ||A||.
SpectralDecomposition eig_symmetric(const Eigen::MatrixXd& A);

// Full complex spectrum (Hessenberg + shifted QR under the hood).
// Near-defective pairs are not rejected; their residuals are reported
// as computed so callers can judge.
SpectralDecomposition eig_complex(const Eigen::MatrixXcd& A);

// Partial-pivoted solve A X = B with a post-hoc residual check.
Eigen::MatrixXcd solve(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);

// Spectral norm by power iteration on A^* A.
double op_norm(const Eigen::MatrixXcd& A);
double op_norm(const Eigen::MatrixXd& A);

}  // namespace ptspec::linalg
