#include "ptspec/quadrature.hpp"

#include <cmath>

namespace ptspec::quad {

namespace {

Eigen::VectorXd jacobi_nodes(int order) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("tridiagonal eigensolve failed for Gauss-Hermite nodes");
  return es.eigenvalues();
}

}  // namespace

Eigen::MatrixXd hermite_functions(const Eigen::VectorXd& points, int count) {
  const auto m = points.size();
  Eigen::MatrixXd H(m, count);
  const double c0 = std::pow(M_PI, -0.25);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = points[i];
    H(i, 0) = c0 * std::exp(-0.5 * x * x);
    if (count > 1) H(i, 1) = std::sqrt(2.0) * x * H(i, 0);
    for (int n = 2; n < count; ++n)
      H(i, n) = x * std::sqrt(2.0 / n) * H(i, n - 1) -
                std::sqrt((n - 1.0) / n) * H(i, n - 2);
  }
  return H;
}

Eigen::VectorXd reduced_weights(const Eigen::VectorXd& nodes, int order) {
  const Eigen::MatrixXd H = hermite_functions(nodes, order);
  return H.rowwise().squaredNorm().cwiseInverse();
}

QuadratureRule gauss_hermite(int order) {
  if (order < 2 || order > 512)
    throw ConvergenceError("Gauss-Hermite order must be in [2, 512]");
  QuadratureRule rule;
  rule.order = order;
  Eigen::VectorXd x = jacobi_nodes(order);
  // enforce exact symmetry about 0 (the Jacobi matrix is sign-symmetric)
  for (int i = 0, j = order - 1; i < j; ++i, --j) {
    const double s = 0.5 * (x[j] - x[i]);
    x[i] = -s;
    x[j] = s;
  }
  if (order % 2 == 1) x[order / 2] = 0.0;

  Eigen::VectorXd wr = reduced_weights(x, order);
  Eigen::VectorXd w(order);
  for (int i = 0; i < order; ++i) w[i] = wr[i] * std::exp(-x[i] * x[i]);
  for (int i = 0, j = order - 1; i < j; ++i, --j) {
    const double s = 0.5 * (w[i] + w[j]);
    w[i] = w[j] = s;
  }
  rule.nodes = std::move(x);
  rule.weights = std::move(w);
  return rule;
}

}  // namespace ptspec::quad
