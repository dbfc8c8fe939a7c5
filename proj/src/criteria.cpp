#include "ptspec/criteria.hpp"

#include <cmath>

#include "ptspec/linalg.hpp"

namespace ptspec::criteria {

std::string to_string(Prediction p) {
  switch (p) {
    case Prediction::ComplexPair: return "complex-pair-predicted";
    case Prediction::RealPair: return "real-pair-predicted";
    case Prediction::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

PairVerdict classify_degenerate(const grushin::GrushinOperators& g) {
  const auto& block = g.block();
  PairVerdict v;
  v.lambda0 = block.lambda0;
  v.tau_product = block.tau_product();
  v.h1_block = block.h1_block;

  const double h11 = block.h1_block(0, 0).real();
  const double h22 = block.h1_block(1, 1).real();
  const double h12 = std::abs(block.h1_block(0, 1));
  v.discriminant = 4.0 * h12 * h12 - (h11 - h22) * (h11 - h22);

  if (v.tau_product > 0.0) {
    v.verdict = Prediction::RealPair;
  } else if (v.discriminant > 0.0) {
    v.verdict = Prediction::ComplexPair;
  } else {
    v.verdict = Prediction::Inconclusive;  // mixed signature, non-positive discriminant
  }

  // heuristic validity radius: series contraction and block scale
  const double h1_scale = std::max(block.h1_block.cwiseAbs().maxCoeff(), 1e-300);
  const double series = 1.0 / std::max(g.h1_norm() * block.gap_norm_R, 1e-300);
  v.epsilon_star = std::min(series, 1.0 / (2.0 * block.gap_norm_R * h1_scale));
  return v;
}

PairVerdict classify_near_degenerate(const linalg::SpectralDecomposition& h0_eig,
                                     int index1, int index2,
                                     const family::OperatorFamily& fam,
                                     double eps) {
  const Eigen::VectorXd lambdas = h0_eig.real_eigenvalues();
  const int n = static_cast<int>(lambdas.size());
  if (index1 < 0 || index2 < 0 || index1 >= n || index2 >= n || index1 == index2)
    throw SimplicityError("near-degenerate pair indices out of range");
  const double e1 = lambdas[std::min(index1, index2)];
  const double e2 = lambdas[std::max(index1, index2)];

  // both levels must be simple
  const double simple_tol = 1e-8 * (1.0 + std::max(std::fabs(e1), std::fabs(e2)));
  for (int i = 0; i < n; ++i) {
    if (i == std::min(index1, index2) || i == std::max(index1, index2)) continue;
    if (std::fabs(lambdas[i] - e1) < simple_tol || std::fabs(lambdas[i] - e2) < simple_tol)
      throw SimplicityError("requested level is part of a cluster");
  }

  PairVerdict v;
  v.near_degenerate = true;
  v.lambda0 = 0.5 * (e1 + e2);
  v.d = e2 - e1;
  double dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (i == std::min(index1, index2) || i == std::max(index1, index2)) continue;
    dist = std::min({dist, std::fabs(lambdas[i] - e1), std::fabs(lambdas[i] - e2)});
  }
  v.big_d = dist;

  const Eigen::VectorXd v1 = h0_eig.eigenvectors.col(std::min(index1, index2)).real();
  const Eigen::VectorXd v2 = h0_eig.eigenvectors.col(std::max(index1, index2)).real();
  const std::complex<double> h12 =
      v1.cast<std::complex<double>>().dot(fam.h1 * v2.cast<std::complex<double>>());
  v.h1_block(0, 0) = v1.cast<std::complex<double>>().dot(fam.h1 * v1.cast<std::complex<double>>());
  v.h1_block(1, 1) = v2.cast<std::complex<double>>().dot(fam.h1 * v2.cast<std::complex<double>>());
  v.h1_block(0, 1) = h12;
  v.h1_block(1, 0) = v2.cast<std::complex<double>>().dot(fam.h1 * v1.cast<std::complex<double>>());
  v.tau_product = (v1.dot(fam.j * v1)) * (v2.dot(fam.j * v2));

  v.coupling = std::fabs(eps) * std::abs(h12);
  v.threshold = 0.5 * v.d;
  const double ratio = v.big_d > 0.0 ? v.d / v.big_d : std::numeric_limits<double>::infinity();

  if (eps == 0.0) {
    v.verdict = Prediction::RealPair;
    v.note = "eps = 0: unperturbed real pair";
  } else if (ratio > 0.5) {
    v.verdict = Prediction::Inconclusive;
    v.note = "d/D = " + std::to_string(ratio) + " is not small; margin reported only";
  } else if (v.coupling > v.threshold) {
    v.verdict = Prediction::ComplexPair;
    if (ratio > 0.05)
      v.note = "d/D = " + std::to_string(ratio) + " only moderately small";
  } else {
    v.verdict = Prediction::Inconclusive;
    v.note = "|eps H12| below d/2";
  }
  return v;
}

RealityCertificate reality_radius(const family::ProblemSpec& spec,
                                  const family::OperatorFamily& fam,
                                  int trusted_request) {
  if (trusted_request < 2)
    throw SimplicityError("need at least two trusted eigenvalues for a gap");

  const Eigen::VectorXd lam = linalg::eig_symmetric(fam.h0).real_eigenvalues();

  family::ProblemSpec grown = spec;
  grown.basis.modes_per_dim =
      static_cast<int>(std::ceil(1.25 * spec.basis.modes_per_dim));
  grown.quadrature_order = 0;
  const family::OperatorFamily fam_grown = family::assemble(grown);
  const Eigen::VectorXd lam_grown =
      linalg::eig_symmetric(fam_grown.h0).real_eigenvalues();

  const int max_count =
      std::min<int>(trusted_request, static_cast<int>(lam.size()));
  RealityCertificate cert;
  for (int i = 0; i < max_count; ++i) {
    if (std::fabs(lam[i] - lam_grown[i]) >= 1e-6) break;
    cert.trusted.push_back(lam[i]);
  }
  cert.trusted_count = static_cast<int>(cert.trusted.size());
  if (cert.trusted_count < trusted_request)
    throw ConvergenceError(
        "only " + std::to_string(cert.trusted_count) +
        " eigenvalues are truncation-converged; requested " +
        std::to_string(trusted_request));

  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < cert.trusted_count; ++i) {
    const double gap = cert.trusted[static_cast<std::size_t>(i + 1)] -
                       cert.trusted[static_cast<std::size_t>(i)];
    const double tol = 1e-8 * (1.0 + std::fabs(cert.trusted[static_cast<std::size_t>(i)]));
    if (gap < tol)
      throw SimplicityError("levels " + std::to_string(i) + " and " +
                            std::to_string(i + 1) + " are degenerate");
    min_gap = std::min(min_gap, gap);
  }
  cert.delta = 0.5 * min_gap;

  // sup-norm bound for multiplication operators; the truncated matrix
  // norm can undershoot the true operator norm
  const family::H1Norm h1n = family::h1_operator_norm(fam);
  if (fam.pt_form) {
    // the certificate needs bounded W: reject perturbations that still
    // grow past the basis support
    basis::HermiteBasis wide = spec.basis;
    wide.length_scale[0] *= 2.0;
    wide.length_scale[1] *= 2.0;
    const double sup_wide =
        basis::node_sup(wide, spec.perturbation, spec.quadrature_order);
    if (sup_wide > 1.05 * h1n.analytic_sup + 1e-12)
      throw SimplicityError(
          "W keeps growing beyond the basis support; the reality criterion "
          "needs a bounded perturbation");
  }
  cert.h1_norm = fam.pt_form ? h1n.analytic_sup : h1n.matrix_norm;
  if (!(cert.h1_norm > 0.0))
    throw SimplicityError("perturbation norm is zero; radius undefined");
  cert.radius = cert.delta / cert.h1_norm;
  return cert;
}

RealityReport verify_reality(const family::OperatorFamily& fam, double eps,
                             const RealityCertificate& cert) {
  if (std::fabs(eps) >= cert.radius)
    throw BracketError("eps outside the certified reality radius");

  const auto dec = linalg::eig_complex(family::evaluate_at(fam, eps));
  RealityReport report;
  report.eps = eps;
  report.all_ok = true;
  for (int l = 0; l < cert.trusted_count; ++l) {
    const double center = cert.trusted[static_cast<std::size_t>(l)];
    LevelCheck check;
    check.lambda = center;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dec.eigenvalues.size(); ++i) {
      const auto z = dec.eigenvalues[i];
      if (std::fabs(z.real() - center) < cert.delta &&
          std::fabs(z.imag()) < cert.delta) {
        ++check.count_in_square;
        if (std::abs(z - std::complex<double>(center, 0.0)) < best) {
          best = std::abs(z - std::complex<double>(center, 0.0));
          check.found = z;
        }
      }
    }
    const double im_tol = 1e-8 * (1.0 + std::fabs(center));
    check.ok = check.count_in_square == 1 && std::fabs(check.found.imag()) <= im_tol;
    if (!check.ok) {
      throw RealityViolation(center, check.found,
                             check.count_in_square != 1
                                 ? std::to_string(check.count_in_square) +
                                       " eigenvalues in the square"
                                 : "imaginary part " +
                                       std::to_string(check.found.imag()));
    }
    report.levels.push_back(check);
  }
  return report;
}

PowerLawFit asymptotic_exponent(const std::vector<double>& lambdas, int from,
                                int to) {
  PowerLawFit fit;
  if (from < 1) from = 1;  // log n needs n >= 1
  if (to > static_cast<int>(lambdas.size())) to = static_cast<int>(lambdas.size());
  const int m = to - from;
  if (m < 2) throw ConvergenceError("not enough points for an asymptotic fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int n = from; n < to; ++n) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(lambdas[static_cast<std::size_t>(n)]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double denom = m * sxx - sx * sx;
  fit.exponent = (m * sxy - sx * sy) / denom;
  fit.log_prefactor = (sy - fit.exponent * sx) / m;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / m;
  for (int n = from; n < to; ++n) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(lambdas[static_cast<std::size_t>(n)]);
    const double yhat = fit.log_prefactor + fit.exponent * x;
    ss_res += (y - yhat) * (y - yhat);
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace ptspec::criteria
