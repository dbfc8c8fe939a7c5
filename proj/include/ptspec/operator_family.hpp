#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>

#include "ptspec/basis.hpp"
#include "ptspec/expr.hpp"

// Assembly of the operator family H(eps) = H0 + eps H1 together with the
// unitary involution J, and numerical verification of the intertwining
// relations J H0 = H0^* J, J H1 = H1^* J.

namespace ptspec::family {

enum class PerturbationForm {
  PTPotential,  // H1 = i W with W a real multiplication operator
  UserMatrix,   // H1 (and optionally J) supplied as dense matrices
};

struct ProblemSpec {
  int dimension = 1;
  basis::HermiteBasis basis;
  expr::Expr potential;     // V
  expr::Expr perturbation;  // W (PT form)
  PerturbationForm form = PerturbationForm::PTPotential;
  std::array<int, 2> reflection = {1, 0};  // j_i in {0,1}; at least one 1
  int quadrature_order = 0;                // 0 -> default 2N+16
  double symmetry_tolerance = 1e-10;

  std::optional<Eigen::MatrixXcd> user_h1;
  std::optional<Eigen::MatrixXd> user_j;

  void validate() const;
};

struct OperatorFamily {
  Eigen::MatrixXd h0;
  Eigen::MatrixXcd h1;
  Eigen::MatrixXd j;

  double residual_h0 = 0.0;  // ||J H0 - H0^* J|| / ||H0||
  double residual_h1 = 0.0;  // ||J H1 - H1^* J|| / ||H1||
  bool valid = false;
  double symmetry_tolerance = 1e-10;

  // sup |W| over the assembly quadrature nodes (PT form only, else 0)
  double w_node_sup = 0.0;
  bool pt_form = true;

  // non-empty when declared parities of V, W disagree with the sampled
  // ones; Theorem 1.1 only needs the intertwining relations, so this is
  // a warning rather than an error
  std::string parity_note;

  int size() const { return static_cast<int>(h0.rows()); }
};

OperatorFamily assemble(const ProblemSpec& spec);

// H0 + eps H1
Eigen::MatrixXcd evaluate_at(const OperatorFamily& fam, double eps);

struct H1Norm {
  double matrix_norm;   // spectral norm of the truncated H1
  double analytic_sup;  // sup-norm bound for multiplication operators
  double bound() const { return analytic_sup > 0.0 ? analytic_sup : matrix_norm; }
};

H1Norm h1_operator_norm(const OperatorFamily& fam);

}  // namespace ptspec::family
