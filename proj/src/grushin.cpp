#include "ptspec/grushin.hpp"

#include <algorithm>
#include <cmath>

namespace ptspec::grushin {

namespace {

std::vector<int> cluster_indices(const Eigen::VectorXd& lambdas, double lambda0,
                                 double cluster_tol) {
  std::vector<int> idx;
  for (int i = 0; i < lambdas.size(); ++i)
    if (std::fabs(lambdas[i] - lambda0) <= cluster_tol) idx.push_back(i);
  return idx;
}

}  // namespace

SpectralCluster spectral_projector(const linalg::SpectralDecomposition& h0_eig,
                                   double lambda0, double cluster_tol) {
  const Eigen::VectorXd lambdas = h0_eig.real_eigenvalues();
  const auto idx = cluster_indices(lambdas, lambda0, cluster_tol);
  if (idx.size() != 1 && idx.size() != 2)
    throw MultiplicityError(static_cast<int>(idx.size()));
  SpectralCluster out;
  const auto n = h0_eig.eigenvectors.rows();
  out.projector = Eigen::MatrixXd::Zero(n, n);
  double mean = 0.0;
  for (int i : idx) {
    Eigen::VectorXd v = h0_eig.eigenvectors.col(i).real();
    out.projector += v * v.transpose();
    out.vectors.push_back(std::move(v));
    mean += lambdas[i];
  }
  out.lambda_mean = mean / static_cast<double>(idx.size());
  return out;
}

SpectralCluster spectral_projector(const family::OperatorFamily& fam,
                                   double lambda0, double cluster_tol) {
  return spectral_projector(linalg::eig_symmetric(fam.h0), lambda0, cluster_tol);
}

TauBasis canonical_tau_basis(const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                             const Eigen::MatrixXd& j) {
  Eigen::Matrix2d gram;
  gram(0, 0) = v1.dot(j * v1);
  gram(0, 1) = v1.dot(j * v2);
  gram(1, 0) = v2.dot(j * v1);
  gram(1, 1) = v2.dot(j * v2);
  gram = 0.5 * (gram + gram.transpose()).eval();
  const double det = gram.determinant();
  if (std::fabs(det) < 1e-10) throw DegenerateFormError(std::fabs(det));

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gram);
  // ascending eigenvalues; put tau = +1 first when present
  const int plus = es.eigenvalues()[1] >= es.eigenvalues()[0] ? 1 : 0;
  const int minus = 1 - plus;

  Eigen::MatrixXd v(v1.size(), 2);
  v.col(0) = v1;
  v.col(1) = v2;

  TauBasis out;
  Eigen::VectorXd e1 = v * es.eigenvectors().col(plus);
  Eigen::VectorXd e2 = v * es.eigenvectors().col(minus);
  e1.normalize();
  e2.normalize();
  // deterministic sign: largest-magnitude component positive
  auto fix_sign = [](Eigen::VectorXd& e) {
    Eigen::Index at;
    e.cwiseAbs().maxCoeff(&at);
    if (e[at] < 0.0) e = -e;
  };
  fix_sign(e1);
  fix_sign(e2);
  out.tau1 = es.eigenvalues()[plus] >= 0.0 ? 1.0 : -1.0;
  out.tau2 = es.eigenvalues()[minus] >= 0.0 ? 1.0 : -1.0;
  out.residual = std::max((j * e1 - out.tau1 * e1).norm(),
                          (j * e2 - out.tau2 * e2).norm());
  out.e1 = std::move(e1);
  out.e2 = std::move(e2);
  return out;
}

Eigen::Matrix2cd effective_matrix(const DegenerateBlock& block,
                                  const family::OperatorFamily& fam) {
  Eigen::Matrix2cd h1;
  const Eigen::VectorXcd h1e1 = fam.h1 * block.e1.cast<Complex>();
  const Eigen::VectorXcd h1e2 = fam.h1 * block.e2.cast<Complex>();
  h1(0, 0) = block.e1.cast<Complex>().dot(h1e1);  // conjugates e1: real anyway
  h1(0, 1) = block.e1.cast<Complex>().dot(h1e2);
  h1(1, 0) = block.e2.cast<Complex>().dot(h1e1);
  h1(1, 1) = block.e2.cast<Complex>().dot(h1e2);

  const double tau[2] = {block.tau1, block.tau2};
  double violation = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      violation = std::max(violation,
                           std::abs(tau[a] * h1(a, b) - tau[b] * std::conj(h1(b, a))));
  const double scale = std::max(1.0, h1.cwiseAbs().maxCoeff());
  if (violation > 1e-10 * scale) throw SymmetryViolation(violation);
  return h1;
}

GrushinOperators::GrushinOperators(const family::OperatorFamily& fam,
                                   double lambda0, double cluster_tol)
    : fam_(&fam), eig_(linalg::eig_symmetric(fam.h0)) {
  build(lambda0, cluster_tol);
}

GrushinOperators::GrushinOperators(const family::OperatorFamily& fam,
                                   linalg::SpectralDecomposition h0_eig,
                                   double lambda0, double cluster_tol)
    : fam_(&fam), eig_(std::move(h0_eig)) {
  build(lambda0, cluster_tol);
}

void GrushinOperators::build(double lambda0, double cluster_tol) {
  const Eigen::VectorXd lambdas = eig_.real_eigenvalues();
  const auto idx = cluster_indices(lambdas, lambda0, cluster_tol);
  if (idx.size() != 2) throw MultiplicityError(static_cast<int>(idx.size()));

  const auto n = eig_.eigenvectors.rows();
  q_complement_.resize(n, n - 2);
  lambda_complement_.resize(n - 2);
  int k = 0;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    if (i == idx[0] || i == idx[1]) continue;
    q_complement_.col(k) = eig_.eigenvectors.col(i).real();
    lambda_complement_[k] = lambdas[i];
    ++k;
  }

  block_.lambda0 = 0.5 * (lambdas[idx[0]] + lambdas[idx[1]]);
  const TauBasis tb = canonical_tau_basis(eig_.eigenvectors.col(idx[0]).real(),
                                          eig_.eigenvectors.col(idx[1]).real(),
                                          fam_->j);
  block_.e1 = tb.e1;
  block_.e2 = tb.e2;
  block_.tau1 = tb.tau1;
  block_.tau2 = tb.tau2;
  const double dist =
      (lambda_complement_.array() - block_.lambda0).abs().minCoeff();
  block_.gap_norm_R = 1.0 / dist;
  block_.h1_block = effective_matrix(block_, *fam_);
  h1_norm_ = linalg::op_norm(fam_->h1);
}

Eigen::MatrixXcd GrushinOperators::e0_apply(Complex z,
                                            const Eigen::MatrixXcd& x) const {
  Eigen::MatrixXcd y = q_complement_.transpose() * x;
  for (int i = 0; i < lambda_complement_.size(); ++i)
    y.row(i) /= (lambda_complement_[i] - z);
  return q_complement_ * y;
}

double GrushinOperators::e0_norm(Complex z) const {
  double best = 0.0;
  for (int i = 0; i < lambda_complement_.size(); ++i)
    best = std::max(best, 1.0 / std::abs(lambda_complement_[i] - z));
  return best;
}

Eigen::MatrixXd GrushinOperators::r_minus() const {
  Eigen::MatrixXd r(block_.e1.size(), 2);
  r.col(0) = block_.e1;
  r.col(1) = block_.e2;
  return r;
}

Eigen::MatrixXd GrushinOperators::r_plus() const {
  return r_minus().transpose();
}

SeriesResult e_minus_plus_series(const GrushinOperators& g,
                                 const family::OperatorFamily& fam, double eps,
                                 Complex z, int order) {
  SeriesResult out;
  out.order = order;
  const double e0n = g.e0_norm(z);
  const double k = std::fabs(eps) * g.h1_norm() * e0n;
  out.contraction = k;
  if (k >= 1.0) throw DivergenceError(k);

  const Eigen::MatrixXcd r_minus = g.r_minus().cast<Complex>();
  const Eigen::MatrixXcd r_plus = g.r_plus().cast<Complex>();

  Eigen::Matrix2cd sum = (z - g.lambda0()) * Eigen::Matrix2cd::Identity();
  Eigen::MatrixXcd x = r_minus;
  double coef = 1.0;
  for (int n = 1; n <= order; ++n) {
    const Eigen::MatrixXcd y = fam.h1 * x;
    coef *= -eps;
    sum += coef * (r_plus * y);
    if (n < order) x = g.e0_apply(z, y);
  }
  out.value = sum;
  // ||term_n|| <= |eps| ||H1|| K^{n-1}; geometric tail from order+1 on
  out.tail_bound =
      std::fabs(eps) * g.h1_norm() * std::pow(k, order) / (1.0 - k);
  return out;
}

Eigen::Matrix2cd e_minus_plus_exact(const GrushinOperators& g,
                                    const family::OperatorFamily& fam,
                                    double eps, Complex z) {
  const int n = fam.size();
  Eigen::MatrixXcd bordered = Eigen::MatrixXcd::Zero(n + 2, n + 2);
  bordered.topLeftCorner(n, n) = family::evaluate_at(fam, eps);
  bordered.topLeftCorner(n, n).diagonal().array() -= z;
  bordered.topRightCorner(n, 2) = g.r_minus().cast<Complex>();
  bordered.bottomLeftCorner(2, n) = g.r_plus().cast<Complex>();

  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n + 2, 2);
  rhs(n, 0) = 1.0;
  rhs(n + 1, 1) = 1.0;
  const Eigen::MatrixXcd x = linalg::solve(bordered, rhs);
  return x.bottomRows(2);
}

double symmetry_check(const GrushinOperators& g, const family::OperatorFamily& fam,
                      double eps, Complex z) {
  Eigen::Matrix2cd tau = Eigen::Matrix2cd::Zero();
  tau(0, 0) = g.block().tau1;
  tau(1, 1) = g.block().tau2;
  const Eigen::Matrix2cd a = e_minus_plus_exact(g, fam, eps, std::conj(z));
  const Eigen::Matrix2cd b = e_minus_plus_exact(g, fam, eps, z);
  return (a.adjoint() * tau - tau * b).norm();
}

std::string to_string(PairClass c) {
  switch (c) {
    case PairClass::RealPair: return "real-pair";
    case PairClass::ComplexConjugatePair: return "complex-conjugate-pair";
    case PairClass::DefectiveTolerance: return "defective-tolerance";
  }
  return "real-pair";
}

namespace {

struct NewtonOutcome {
  Complex root;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

NewtonOutcome newton_root(const GrushinOperators& g,
                          const family::OperatorFamily& fam, double eps,
                          Complex seed) {
  auto det_at = [&](Complex z) {
    return e_minus_plus_exact(g, fam, eps, z).determinant();
  };
  NewtonOutcome out;
  Complex z = seed;
  Complex f = det_at(z);
  const double ftol = 1e-12;
  const double scale0 = 1.0 + std::abs(g.lambda0());
  for (int it = 0; it < 50; ++it) {
    ++out.iterations;
    if (std::abs(f) <= ftol) break;
    const double h = 1e-7 * (1.0 + std::abs(z));
    const Complex df = (det_at(z + h) - det_at(z - h)) / (2.0 * h);
    if (df == Complex(0.0, 0.0)) break;
    Complex step = f / df;
    // damping: insist on residual decrease
    Complex z_new = z - step;
    Complex f_new = det_at(z_new);
    int halvings = 0;
    while (std::abs(f_new) > std::abs(f) && halvings < 25) {
      step *= 0.5;
      z_new = z - step;
      f_new = det_at(z_new);
      ++halvings;
    }
    z = z_new;
    f = f_new;
    if (std::abs(step) <= 1e-15 * scale0) break;
  }
  out.root = z;
  out.residual = std::abs(f);
  out.converged = out.residual <= ftol;
  return out;
}

}  // namespace

EigenvaluePair eigenvalues_near(const GrushinOperators& g,
                                const family::OperatorFamily& fam, double eps) {
  EigenvaluePair out;
  const double lambda0 = g.lambda0();
  const double im_tol = 1e-10 * (1.0 + std::fabs(lambda0));
  if (eps == 0.0) {
    out.z_plus = out.z_minus = lambda0;
    out.classification = PairClass::RealPair;
    return out;
  }

  const Eigen::Matrix2cd h1 = g.block().h1_block;
  const Complex mean = 0.5 * (h1(0, 0) + h1(1, 1));
  const Complex disc = (h1(0, 0) - h1(1, 1)) * (h1(0, 0) - h1(1, 1)) +
                       4.0 * h1(0, 1) * h1(1, 0);
  const Complex sq = std::sqrt(disc);
  const Complex seed_a = lambda0 + eps * mean + 0.5 * eps * sq;
  const Complex seed_b = lambda0 + eps * mean - 0.5 * eps * sq;

  NewtonOutcome ra = newton_root(g, fam, eps, seed_a);
  NewtonOutcome rb = newton_root(g, fam, eps, seed_b);
  out.newton_iterations = ra.iterations + rb.iterations;
  out.final_residual = std::max(ra.residual, rb.residual);
  if (!ra.converged || !rb.converged) {
    const double radius = 0.25 / g.norm_R();
    const int count = winding_number(g, fam, eps, radius);
    throw NewtonDivergence(!ra.converged ? seed_a : seed_b,
                           "winding count on |z - lambda0| = 1/(4R): " +
                               std::to_string(count));
  }

  Complex zp = ra.root, zm = rb.root;
  if (std::abs(zp - zm) < 1e-7) {
    out.classification = PairClass::DefectiveTolerance;
  } else if (std::fabs(zp.imag()) <= im_tol && std::fabs(zm.imag()) <= im_tol) {
    out.classification = PairClass::RealPair;
    zp = Complex(zp.real(), 0.0);
    zm = Complex(zm.real(), 0.0);
  } else {
    out.classification = PairClass::ComplexConjugatePair;
    // enforce the conjugate-pair symmetry exactly
    if (zp.imag() < zm.imag()) std::swap(zp, zm);
    zp = 0.5 * (zp + std::conj(zm));
    zm = std::conj(zp);
  }
  if (zm.real() < zp.real() ||
      (zm.real() == zp.real() && zm.imag() < zp.imag()))
    std::swap(zp, zm);
  out.z_plus = zp;
  out.z_minus = zm;
  return out;
}

int winding_number(const GrushinOperators& g, const family::OperatorFamily& fam,
                   double eps, double radius, int points) {
  double total = 0.0;
  double prev_arg = 0.0;
  for (int k = 0; k <= points; ++k) {
    const double t = 2.0 * M_PI * k / points;
    const Complex z = g.lambda0() + radius * Complex(std::cos(t), std::sin(t));
    const Complex d = e_minus_plus_exact(g, fam, eps, z).determinant();
    const double a = std::arg(d);
    if (k > 0) {
      double diff = a - prev_arg;
      while (diff > M_PI) diff -= 2.0 * M_PI;
      while (diff < -M_PI) diff += 2.0 * M_PI;
      total += diff;
    }
    prev_arg = a;
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

}  // namespace ptspec::grushin
