#pragma once

#include <Eigen/Dense>
#include <array>

#include "ptspec/expr.hpp"
#include "ptspec/quadrature.hpp"

// Scaled Hermite-function bases in 1D and 2D tensor form, plus a 1D
// finite-difference grid used as an independent cross-check.

namespace ptspec::basis {

// Basis functions h_n(x_i / l_i) / sqrt(l_i) per dimension, tensorized in
// 2D with row-major flattening (n1 * N + n2). The kinetic coefficient c
// multiplies -Laplacian when the operator is assembled (hbar^2, or 1/2
// for oscillator conventions).
struct HermiteBasis {
  int dimension = 1;
  int modes_per_dim = 4;
  std::array<double, 2> length_scale = {1.0, 1.0};
  double kinetic_coefficient = 1.0;

  int size() const {
    return dimension == 1 ? modes_per_dim : modes_per_dim * modes_per_dim;
  }
  void validate() const;
};

inline int default_quadrature_order(int modes_per_dim) {
  return 2 * modes_per_dim + 16;
}

// Matrix of c * (-Laplacian) in the scaled basis: pentadiagonal per 1D
// factor by ladder identities, Kronecker-summed in 2D.
Eigen::MatrixXd kinetic_matrix(const HermiteBasis& basis);

// <h_i| f |h_j> by tensorized Gauss-Hermite quadrature; symmetrized on
// return. quadrature_order <= 0 selects the default.
Eigen::MatrixXd potential_matrix(const HermiteBasis& basis, const expr::Expr& f,
                                 int quadrature_order = 0);

// Largest |f| over the quadrature nodes of the basis; serves as the
// multiplication-operator sup-norm estimate for bounded f.
double node_sup(const HermiteBasis& basis, const expr::Expr& f,
                int quadrature_order = 0);

// Signed-diagonal parity matrix P h_n = (-1)^n h_n per reflected
// dimension; reflect[i] != 0 selects x_i -> -x_i.
Eigen::VectorXd parity_diagonal(const HermiteBasis& basis,
                                std::array<int, 2> reflect);

// Uniform symmetric grid on [-L, L] with Dirichlet truncation.
struct FDGrid {
  double half_width = 10.0;
  int points = 16;

  double spacing() const { return 2.0 * half_width / (points - 1); }
  double point(int i) const { return -half_width + i * spacing(); }
  void validate() const;
};

// c * (3-point Laplacian) + diag(V); 1D only.
Eigen::MatrixXd fd_operator(const FDGrid& grid, const expr::Expr& V,
                            double kinetic_coefficient);

// Eigenvalues of fd_operator through the tridiagonal structure; cheap
// enough for fine oracle grids.
Eigen::VectorXd fd_eigenvalues(const FDGrid& grid, const expr::Expr& V,
                               double kinetic_coefficient);

// Index-reversal permutation representing x -> -x on the grid.
Eigen::MatrixXd fd_parity(const FDGrid& grid);

}  // namespace ptspec::basis
