#include "ptspec/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace ptspec::linalg {

namespace {

Eigen::VectorXd residual_norms(const Eigen::MatrixXcd& A,
                               const Eigen::VectorXcd& lambda,
                               const Eigen::MatrixXcd& V) {
  Eigen::VectorXd r(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    r[i] = (A * V.col(i) - lambda[i] * V.col(i)).norm();
  return r;
}

std::vector<Eigen::Index> sort_order(const Eigen::VectorXcd& lambda) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(lambda.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (lambda[a].real() != lambda[b].real())
      return lambda[a].real() < lambda[b].real();
    return lambda[a].imag() < lambda[b].imag();
  });
  return idx;
}

}  // namespace

SpectralDecomposition eig_symmetric(const Eigen::MatrixXd& A) {
  const double scale = A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
    throw AssemblyError("eig_symmetric requires a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("symmetric eigensolver did not converge");
  SpectralDecomposition out;
  out.eigenvalues = es.eigenvalues().cast<std::complex<double>>();
  out.eigenvectors = es.eigenvectors().cast<std::complex<double>>();
  out.residuals =
      residual_norms(A.cast<std::complex<double>>(), out.eigenvalues, out.eigenvectors);
  return out;
}

SpectralDecomposition eig_complex(const Eigen::MatrixXcd& A) {
  if (!A.allFinite()) throw AssemblyError("eig_complex requires finite entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("complex QR iteration did not converge");
  const auto order = sort_order(es.eigenvalues());
  SpectralDecomposition out;
  const Eigen::Index n = A.rows();
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = es.eigenvalues()[order[static_cast<std::size_t>(i)]];
    Eigen::VectorXcd v = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    out.eigenvectors.col(i) = v / v.norm();
  }
  out.residuals = residual_norms(A, out.eigenvalues, out.eigenvectors);
  return out;
}

Eigen::MatrixXcd solve(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  if (A.rows() != A.cols()) throw AssemblyError("solve requires a square matrix");
  if (A.rows() != B.rows()) throw AssemblyError("solve: shape mismatch");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double norm_a = A.cwiseAbs().maxCoeff();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot < 1e-14 * std::max(norm_a, 1e-300))
    throw SingularError(min_pivot);
  Eigen::MatrixXcd X = lu.solve(B);
  const double res = (A * X - B).norm();
  if (res > 1e-10 * std::max(1e-300, A.norm() * X.norm() + B.norm()))
    throw SingularError(min_pivot);
  return X;
}

double op_norm(const Eigen::MatrixXcd& A) {
  if (A.size() == 0) return 0.0;
  const Eigen::Index n = A.cols();
  // deterministic start with components in every direction
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = std::complex<double>(1.0 + 0.5 * std::cos(0.7 * static_cast<double>(i)),
                                0.25 * std::sin(1.3 * static_cast<double>(i) + 0.4));
  v /= v.norm();
  double prev = 0.0;
  constexpr int cap = 10000;
  for (int it = 0; it < cap; ++it) {
    Eigen::VectorXcd w = A.adjoint() * (A * v);
    const double s2 = w.norm();
    if (s2 == 0.0) return 0.0;
    const double sigma = std::sqrt(s2);
    v = w / s2;
    if (it > 0 && std::abs(sigma - prev) <= 1e-10 * std::max(sigma, 1e-300))
      return sigma;
    prev = sigma;
  }
  throw ConvergenceError("power iteration for the operator norm hit its cap");
}

double op_norm(const Eigen::MatrixXd& A) {
  return op_norm(Eigen::MatrixXcd(A.cast<std::complex<double>>()));
}

}  // namespace ptspec::linalg
