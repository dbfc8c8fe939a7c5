#pragma once

#include <Eigen/Dense>

#include "ptspec/errors.hpp"

namespace ptspec::quad {

// Gauss-Hermite rule for the weight e^{-x^2} on the real line.
struct QuadratureRule {
  Eigen::VectorXd nodes;    // strictly increasing, symmetric about 0
  Eigen::VectorXd weights;  // positive, sum = sqrt(pi)
  int order = 0;
};

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix with
// off-diagonals sqrt(k/2); weights are Christoffel numbers evaluated
// through Hermite functions (equal to sqrt(pi) times the squared first
// eigenvector components, but stable for large orders).
QuadratureRule gauss_hermite(int order);

// Values of the orthonormal Hermite functions h_0..h_{count-1} at the
// given points, column n holding h_n. Bounded, stable at any order.
Eigen::MatrixXd hermite_functions(const Eigen::VectorXd& points, int count);

// Reduced quadrature weights w_k * e^{x_k^2}: the natural weights for
// integrands expressed through Hermite functions. O(1) magnitudes.
Eigen::VectorXd reduced_weights(const Eigen::VectorXd& nodes, int order);

}  // namespace ptspec::quad
