#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "ptspec/grushin.hpp"
#include "ptspec/operator_family.hpp"

// Decision procedures: complex-pair existence on a degenerate level, the
// near-degenerate variant for a close pair of simple levels, and the
// reality radius |eps| < delta / ||H1|| with its per-level verification.

namespace ptspec::criteria {

enum class Prediction { ComplexPair, RealPair, Inconclusive };

std::string to_string(Prediction p);

struct PairVerdict {
  double lambda0 = 0.0;
  double tau_product = 0.0;
  Eigen::Matrix2cd h1_block = Eigen::Matrix2cd::Zero();
  double discriminant = 0.0;  // 4 |H12|^2 - (H11 - H22)^2
  Prediction verdict = Prediction::Inconclusive;
  double epsilon_star = 0.0;  // heuristic validity radius

  // near-degenerate variant (two simple levels)
  bool near_degenerate = false;
  double d = 0.0;          // E2 - E1
  double big_d = 0.0;      // distance of the pair to the rest of sigma(H0)
  double coupling = 0.0;   // |eps H12|
  double threshold = 0.0;  // d / 2
  std::string note;
};

// Theorem on a degenerate block: complex pair predicted iff tau1 tau2 = -1
// and the discriminant is positive; real pair iff tau1 tau2 = +1.
PairVerdict classify_degenerate(const grushin::GrushinOperators& g);

// Near-degenerate pair of simple levels E1 < E2: complex pair predicted
// when |eps H12| > d/2 with d/D small; the margin is always reported.
PairVerdict classify_near_degenerate(const linalg::SpectralDecomposition& h0_eig,
                                     int index1, int index2,
                                     const family::OperatorFamily& fam,
                                     double eps);

struct RealityCertificate {
  double delta = 0.0;      // half the minimal gap over the trusted prefix
  double h1_norm = 0.0;    // sup-norm bound in PT form, matrix norm otherwise
  double radius = 0.0;     // delta / ||H1||
  int trusted_count = 0;
  std::vector<double> trusted;  // the converged eigenvalues
};

// delta from the trusted (truncation-converged) prefix of sigma(H0).
// The prefix is the longest initial run, capped at trusted_request,
// whose eigenvalues move by < 1e-6 when the basis grows by 25%.
RealityCertificate reality_radius(const family::ProblemSpec& spec,
                                  const family::OperatorFamily& fam,
                                  int trusted_request);

struct LevelCheck {
  double lambda = 0.0;
  std::complex<double> found;
  int count_in_square = 0;
  bool ok = false;
};

struct RealityReport {
  double eps = 0.0;
  std::vector<LevelCheck> levels;
  bool all_ok = false;
};

// Diagonalize H(eps) and require exactly one eigenvalue, real to
// |Im| <= 1e-8 (1 + |lambda_l|), in each open square Q_l of side
// 2 delta. Throws RealityViolation on failure.
RealityReport verify_reality(const family::OperatorFamily& fam, double eps,
                             const RealityCertificate& cert);

struct PowerLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 0.0;
};

// Least-squares fit of log lambda_n against log n over [from, to).
PowerLawFit asymptotic_exponent(const std::vector<double>& lambdas, int from,
                                int to);

}  // namespace ptspec::criteria
