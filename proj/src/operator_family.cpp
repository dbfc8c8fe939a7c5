#include "ptspec/operator_family.hpp"

#include "ptspec/linalg.hpp"

namespace ptspec::family {

void ProblemSpec::validate() const {
  basis.validate();
  if (dimension != basis.dimension)
    throw AssemblyError("problem dimension disagrees with the basis");
  if (form == PerturbationForm::PTPotential) {
    if (potential.empty() || perturbation.empty())
      throw AssemblyError("PT form needs both V and W expressions");
    bool any = false;
    for (int d = 0; d < dimension; ++d) any = any || reflection[static_cast<std::size_t>(d)] != 0;
    if (!any) throw AssemblyError("reflection pattern must flip at least one coordinate");
  } else {
    if (!user_h1) throw AssemblyError("matrix form needs an H1 matrix");
  }
}

OperatorFamily assemble(const ProblemSpec& spec) {
  spec.validate();
  OperatorFamily fam;
  fam.symmetry_tolerance = spec.symmetry_tolerance;

  try {
    fam.h0 = basis::kinetic_matrix(spec.basis) +
             basis::potential_matrix(spec.basis, spec.potential, spec.quadrature_order);
  } catch (const EvalError& e) {
    throw AssemblyError(std::string("assembling H0: ") + e.what());
  }

  const int n = static_cast<int>(fam.h0.rows());
  if (spec.form == PerturbationForm::PTPotential) {
    fam.pt_form = true;
    try {
      const Eigen::MatrixXd w =
          basis::potential_matrix(spec.basis, spec.perturbation, spec.quadrature_order);
      fam.h1 = std::complex<double>(0.0, 1.0) * w.cast<std::complex<double>>();
      fam.w_node_sup = basis::node_sup(spec.basis, spec.perturbation, spec.quadrature_order);
    } catch (const EvalError& e) {
      throw AssemblyError(std::string("assembling H1: ") + e.what());
    }
    fam.j = basis::parity_diagonal(spec.basis, spec.reflection).asDiagonal();
    std::array<int, 2> signs = {spec.reflection[0] ? -1 : 1,
                                spec.reflection[1] ? -1 : 1};
    const auto wp = expr::detect_parity(spec.perturbation,
                                        {signs.data(), static_cast<std::size_t>(spec.dimension)});
    const auto vp = expr::detect_parity(spec.potential,
                                        {signs.data(), static_cast<std::size_t>(spec.dimension)});
    if (wp != expr::Parity::Odd)
      fam.parity_note += "W is not odd under the declared reflection (" +
                         expr::to_string(wp) + "); ";
    if (vp != expr::Parity::Even)
      fam.parity_note += "V is not even under the declared reflection (" +
                         expr::to_string(vp) + "); ";
  } else {
    fam.pt_form = false;
    if (spec.user_h1->rows() != n || spec.user_h1->cols() != n)
      throw AssemblyError("user H1 has the wrong shape");
    fam.h1 = *spec.user_h1;
    if (spec.user_j) {
      if (spec.user_j->rows() != n || spec.user_j->cols() != n)
        throw AssemblyError("user J has the wrong shape");
      fam.j = *spec.user_j;
      const double inv = (fam.j * fam.j - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
      const double sym = (fam.j - fam.j.transpose()).cwiseAbs().maxCoeff();
      if (inv > 1e-12 || sym > 1e-12)
        throw AssemblyError("user J is not a symmetric involution");
    } else {
      fam.j = basis::parity_diagonal(spec.basis, spec.reflection).asDiagonal();
    }
  }

  // intertwining residuals of Eq. J H = H^* J, relative
  const Eigen::MatrixXcd jc = fam.j.cast<std::complex<double>>();
  const Eigen::MatrixXcd h0c = fam.h0.cast<std::complex<double>>();
  const double n0 = std::max(fam.h0.norm(), 1e-300);
  const double n1 = std::max(fam.h1.norm(), 1e-300);
  fam.residual_h0 = (jc * h0c - h0c.adjoint() * jc).norm() / n0;
  fam.residual_h1 = (jc * fam.h1 - fam.h1.adjoint() * jc).norm() / n1;
  fam.valid = fam.residual_h0 <= spec.symmetry_tolerance &&
              fam.residual_h1 <= spec.symmetry_tolerance;
  return fam;
}

Eigen::MatrixXcd evaluate_at(const OperatorFamily& fam, double eps) {
  return fam.h0.cast<std::complex<double>>() + eps * fam.h1;
}

H1Norm h1_operator_norm(const OperatorFamily& fam) {
  H1Norm out;
  out.matrix_norm = linalg::op_norm(fam.h1);
  out.analytic_sup = fam.pt_form ? fam.w_node_sup : 0.0;
  return out;
}

}  // namespace ptspec::family
