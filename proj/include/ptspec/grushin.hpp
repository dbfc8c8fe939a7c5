#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ptspec/linalg.hpp"
#include "ptspec/operator_family.hpp"

// Grushin (Feshbach) reduction of H(eps) near a doubly degenerate
// eigenvalue lambda0 of H0: spectral projector, canonical tau-basis of
// the eigenspace, the effective 2x2 block, the E_{-+} Neumann series and
// its exact bordered-solve counterpart, symmetry identities, and
// eigenvalue extraction from det E_{-+}(z) = 0.

namespace ptspec::grushin {

using Complex = std::complex<double>;

struct SpectralCluster {
  Eigen::MatrixXd projector;              // sum of eigenvector dyads
  std::vector<Eigen::VectorXd> vectors;   // orthonormal cluster eigenvectors
  double lambda_mean = 0.0;
};

// Cluster of H0 eigenvalues within cluster_tol of lambda0; the cluster
// must have size 1 (simple level) or 2 (degenerate block).
SpectralCluster spectral_projector(const family::OperatorFamily& fam,
                                   double lambda0, double cluster_tol);
SpectralCluster spectral_projector(const linalg::SpectralDecomposition& h0_eig,
                                   double lambda0, double cluster_tol);

struct TauBasis {
  Eigen::VectorXd e1, e2;
  double tau1 = 1.0, tau2 = 1.0;
  double residual = 0.0;  // max_j ||J e_j - tau_j e_j||
  double tau_product() const { return tau1 * tau2; }
};

// Diagonalize the restriction of J to span(v1, v2): J e_j = tau_j e_j
// with tau_j = +-1, ordered tau = +1 first. Throws DegenerateFormError
// when the restricted form is numerically singular.
TauBasis canonical_tau_basis(const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                             const Eigen::MatrixXd& j);

struct DegenerateBlock {
  double lambda0 = 0.0;      // cluster mean
  Eigen::VectorXd e1, e2;    // canonical basis, J e_j = tau_j e_j
  double tau1 = 1.0, tau2 = 1.0;
  Eigen::Matrix2cd h1_block; // H1_{jk} = (H1 e_k | e_j^*)
  double gap_norm_R = 0.0;   // ||E0(lambda0)|| = 1 / dist to rest of spectrum
  double tau_product() const { return tau1 * tau2; }
};

// H1 restricted to the canonical basis, with the paper's constraint
// tau_j H1_{jk} = tau_k conj(H1_{kj}) verified.
Eigen::Matrix2cd effective_matrix(const DegenerateBlock& block,
                                  const family::OperatorFamily& fam);

// Caches the H0 eigendecomposition and the degenerate block; all
// evaluations are const and safe to run concurrently.
class GrushinOperators {
 public:
  GrushinOperators(const family::OperatorFamily& fam, double lambda0,
                   double cluster_tol);
  GrushinOperators(const family::OperatorFamily& fam,
                   linalg::SpectralDecomposition h0_eig, double lambda0,
                   double cluster_tol);

  const DegenerateBlock& block() const { return block_; }
  double lambda0() const { return block_.lambda0; }
  double norm_R() const { return block_.gap_norm_R; }
  double h1_norm() const { return h1_norm_; }
  const linalg::SpectralDecomposition& h0_eig() const { return eig_; }

  // E0(z) X = (H0 - z)^{-1} (1 - Pi0) X through the eigenbasis
  Eigen::MatrixXcd e0_apply(Complex z, const Eigen::MatrixXcd& x) const;
  // upper bound max_i 1/|lambda_i - z| over the complement = ||E0(z)||
  double e0_norm(Complex z) const;

  Eigen::MatrixXd r_minus() const;  // n x 2, columns e1 e2
  Eigen::MatrixXd r_plus() const;   // 2 x n, rows e1^T e2^T

 private:
  const family::OperatorFamily* fam_;
  linalg::SpectralDecomposition eig_;
  Eigen::MatrixXd q_complement_;     // eigenvectors off the cluster
  Eigen::VectorXd lambda_complement_;
  DegenerateBlock block_;
  double h1_norm_ = 0.0;

  void build(double lambda0, double cluster_tol);
};

struct SeriesResult {
  Eigen::Matrix2cd value;
  double tail_bound = 0.0;
  double contraction = 0.0;  // K = |eps| ||H1|| ||E0(z)||
  int order = 0;
};

// (z - lambda0) I + sum_{n>=1} (-eps)^n E0_- (H1 E0)^{n-1} H1 E0_+ with a
// geometric tail bound; DivergenceError when the contraction K >= 1.
SeriesResult e_minus_plus_series(const GrushinOperators& g,
                                 const family::OperatorFamily& fam, double eps,
                                 Complex z, int order);

// Exact E_{-+}(z) block of the inverse of [[H_eps - z, R_-], [R_+, 0]].
Eigen::Matrix2cd e_minus_plus_exact(const GrushinOperators& g,
                                    const family::OperatorFamily& fam,
                                    double eps, Complex z);

// Residual of E_{-+}(conj z)^* tau = tau E_{-+}(z).
double symmetry_check(const GrushinOperators& g, const family::OperatorFamily& fam,
                      double eps, Complex z);

enum class PairClass { RealPair, ComplexConjugatePair, DefectiveTolerance };

std::string to_string(PairClass c);

struct EigenvaluePair {
  Complex z_plus, z_minus;   // ordered by (re, im)
  PairClass classification = PairClass::RealPair;
  int newton_iterations = 0; // total across both seeds
  double final_residual = 0.0;
};

// Roots of det E_{-+}(z) = 0 near lambda0 by damped Newton from the
// first-order seeds lambda0 + eps (H11+H22)/2 +- (eps/2) sqrt(...).
EigenvaluePair eigenvalues_near(const GrushinOperators& g,
                                const family::OperatorFamily& fam, double eps);

// Winding number of det E_{-+} along |z - lambda0| = radius; certifies
// the root count inside the disk.
int winding_number(const GrushinOperators& g, const family::OperatorFamily& fam,
                   double eps, double radius, int points = 32);

}  // namespace ptspec::grushin
