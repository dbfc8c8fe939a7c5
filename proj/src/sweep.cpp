#include "ptspec/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ptspec/linalg.hpp"

namespace ptspec::sweep {

namespace {

using Complex = std::complex<double>;

std::vector<Complex> spectrum_at(const family::OperatorFamily& fam, double eps) {
  const auto dec = linalg::eig_complex(family::evaluate_at(fam, eps));
  std::vector<Complex> out(static_cast<std::size_t>(dec.eigenvalues.size()));
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i)
    out[static_cast<std::size_t>(i)] = dec.eigenvalues[i];
  return out;
}

// Assign each tracked value to a distinct candidate minimizing the total
// squared distance: greedy in trajectory order, then pairwise-swap
// repair until stable. Records near-ties in `log`.
std::vector<int> match_step(const std::vector<Complex>& tracked,
                            const std::vector<Complex>& candidates,
                            double eps_at, std::vector<std::string>& log) {
  const int m = static_cast<int>(tracked.size());
  const int n = static_cast<int>(candidates.size());
  std::vector<int> pick(static_cast<std::size_t>(m), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  auto cost = [&](int t, int c) {
    return std::norm(tracked[static_cast<std::size_t>(t)] -
                     candidates[static_cast<std::size_t>(c)]);
  };
  for (int t = 0; t < m; ++t) {
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    int arg = -1;
    for (int c = 0; c < n; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double v = cost(t, c);
      if (v < best) {
        second = best;
        best = v;
        arg = c;
      } else if (v < second) {
        second = v;
      }
    }
    if (arg < 0) throw AssemblyError("sweep matching ran out of candidates");
    if (second - best < 1e-12 && second != std::numeric_limits<double>::infinity())
      log.push_back("eps = " + std::to_string(eps_at) + ": trajectory " +
                    std::to_string(t) + " matched by index order (cost tie)");
    pick[static_cast<std::size_t>(t)] = arg;
    used[static_cast<std::size_t>(arg)] = 1;
  }
  // pairwise-swap repair toward the optimal assignment
  bool improved = true;
  int passes = 0;
  while (improved && passes < 64) {
    improved = false;
    ++passes;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        const double now = cost(a, pick[static_cast<std::size_t>(a)]) +
                           cost(b, pick[static_cast<std::size_t>(b)]);
        const double swapped = cost(a, pick[static_cast<std::size_t>(b)]) +
                               cost(b, pick[static_cast<std::size_t>(a)]);
        if (swapped < now - 1e-15 * (1.0 + now)) {
          std::swap(pick[static_cast<std::size_t>(a)], pick[static_cast<std::size_t>(b)]);
          improved = true;
        }
      }
  }
  return pick;
}

}  // namespace

SweepTrace sweep(const family::OperatorFamily& fam, std::span<const double> eps_grid,
                 const Window& window) {
  if (eps_grid.empty()) throw AssemblyError("sweep needs a non-empty eps grid");
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (!(eps_grid[i] > eps_grid[i - 1]))
      throw AssemblyError("sweep grid must be strictly increasing");

  SweepTrace trace;
  trace.epsilons.assign(eps_grid.begin(), eps_grid.end());

  // seed trajectories from the first grid point
  std::vector<Complex> all0 = spectrum_at(fam, eps_grid[0]);
  std::sort(all0.begin(), all0.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::vector<Complex> tracked;
  if (window.kind == Window::Kind::LowestCount) {
    const int count = std::min<int>(window.count, static_cast<int>(all0.size()));
    tracked.assign(all0.begin(), all0.begin() + count);
  } else {
    for (const Complex& z : all0)
      if (z.real() >= window.lo && z.real() <= window.hi) tracked.push_back(z);
  }
  if (tracked.empty()) throw AssemblyError("sweep window selects no eigenvalues");

  const int m = static_cast<int>(tracked.size());
  trace.trajectories.assign(static_cast<std::size_t>(m), {});
  for (int t = 0; t < m; ++t)
    trace.trajectories[static_cast<std::size_t>(t)].push_back(
        tracked[static_cast<std::size_t>(t)]);

  for (std::size_t k = 1; k < eps_grid.size(); ++k) {
    const std::vector<Complex> cand = spectrum_at(fam, eps_grid[k]);
    const auto pick = match_step(tracked, cand, eps_grid[k], trace.log);
    for (int t = 0; t < m; ++t) {
      tracked[static_cast<std::size_t>(t)] = cand[static_cast<std::size_t>(pick[static_cast<std::size_t>(t)])];
      trace.trajectories[static_cast<std::size_t>(t)].push_back(
          tracked[static_cast<std::size_t>(t)]);
    }
  }

  auto is_real = [](Complex z) {
    return std::fabs(z.imag()) <= 1e-10 * (1.0 + std::abs(z.real()));
  };
  trace.real_throughout.assign(static_cast<std::size_t>(m), true);
  for (int t = 0; t < m; ++t)
    for (const Complex& z : trace.trajectories[static_cast<std::size_t>(t)])
      if (!is_real(z)) {
        trace.real_throughout[static_cast<std::size_t>(t)] = false;
        break;
      }

  // real -> complex transitions: pair each newly complex trajectory with
  // its conjugate partner at the same step
  for (int t = 0; t < m; ++t) {
    const auto& traj = trace.trajectories[static_cast<std::size_t>(t)];
    for (std::size_t k = 1; k < traj.size(); ++k) {
      if (!is_real(traj[k - 1]) || is_real(traj[k])) continue;
      if (traj[k].imag() < 0.0) continue;  // record each pair once
      int partner = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int s = 0; s < m; ++s) {
        if (s == t) continue;
        const Complex w = trace.trajectories[static_cast<std::size_t>(s)][k];
        const double dist = std::abs(w - std::conj(traj[k]));
        if (dist < best) {
          best = dist;
          partner = s;
        }
      }
      ExceptionalRecord rec;
      rec.eps_lo = trace.epsilons[k - 1];
      rec.eps_hi = trace.epsilons[k];
      rec.traj_a = t;
      rec.traj_b = partner;
      rec.lambda_at = Complex(traj[k].real(), 0.0);
      trace.exceptional_points.push_back(rec);
    }
  }
  return trace;
}

namespace {

double pair_max_imag(const family::OperatorFamily& fam, double eps,
                     double lambda_ref) {
  const std::vector<Complex> all = spectrum_at(fam, eps);
  // the two eigenvalues nearest the reference level
  double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
  Complex z1, z2;
  for (const Complex& z : all) {
    const double d = std::fabs(z.real() - lambda_ref);
    if (d < d1) {
      d2 = d1; z2 = z1;
      d1 = d; z1 = z;
    } else if (d < d2) {
      d2 = d; z2 = z;
    }
  }
  return std::max(std::fabs(z1.imag()), std::fabs(z2.imag()));
}

}  // namespace

EpResult locate_exceptional_point(const family::OperatorFamily& fam,
                                  double lambda_ref, double bracket_lo,
                                  double bracket_hi, double relative_width) {
  if (!(bracket_lo < bracket_hi)) throw BracketError("empty bracket");
  const double tol = 1e-10 * (1.0 + std::fabs(lambda_ref));
  const bool lo_complex = pair_max_imag(fam, bracket_lo, lambda_ref) > tol;
  const bool hi_complex = pair_max_imag(fam, bracket_hi, lambda_ref) > tol;
  if (lo_complex)
    throw BracketError("pair already complex at the left bracket endpoint");
  if (!hi_complex)
    throw BracketError("pair still real at the right bracket endpoint");

  double lo = bracket_lo, hi = bracket_hi;
  const double scale = std::max(std::fabs(bracket_lo), std::fabs(bracket_hi));
  while (hi - lo > relative_width * scale) {
    const double mid = 0.5 * (lo + hi);
    if (pair_max_imag(fam, mid, lambda_ref) > tol)
      hi = mid;
    else
      lo = mid;
  }
  return {0.5 * (lo + hi), hi - lo};
}

SplittingFit fit_splitting_law(
    const std::function<family::ProblemSpec(double)>& generator,
    std::span<const double> params, FitAbscissa abscissa) {
  if (params.size() < 5)
    throw ConvergenceError("splitting fit needs at least 5 parameter samples");

  SplittingFit fit;
  for (const double p : params) {
    family::ProblemSpec spec = generator(p);
    const family::OperatorFamily fam = family::assemble(spec);
    const Eigen::VectorXd lam = linalg::eig_symmetric(fam.h0).real_eigenvalues();

    family::ProblemSpec grown = spec;
    grown.basis.modes_per_dim =
        static_cast<int>(std::ceil(1.25 * spec.basis.modes_per_dim));
    grown.quadrature_order = 0;
    const family::OperatorFamily fam_grown = family::assemble(grown);
    const Eigen::VectorXd lam_grown =
        linalg::eig_symmetric(fam_grown.h0).real_eigenvalues();
    for (int i = 0; i < 2; ++i) {
      const double move = std::fabs(lam[i] - lam_grown[i]) / (1.0 + std::fabs(lam[i]));
      if (move > 1e-8)
        throw ConvergenceError("two lowest eigenvalues not truncation-converged at parameter " +
                               std::to_string(p));
    }
    const double gap = lam[1] - lam[0];
    if (!(gap > 0.0))
      throw ConvergenceError("vanishing splitting at parameter " + std::to_string(p));
    fit.abscissa.push_back(abscissa == FitAbscissa::InverseParam ? 1.0 / p
                                                                 : 1.0 / (p * p));
    fit.log_gap.push_back(std::log(gap));
  }

  const int n = static_cast<int>(fit.abscissa.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += fit.abscissa[static_cast<std::size_t>(i)];
    sy += fit.log_gap[static_cast<std::size_t>(i)];
    sxx += fit.abscissa[static_cast<std::size_t>(i)] * fit.abscissa[static_cast<std::size_t>(i)];
    sxy += fit.abscissa[static_cast<std::size_t>(i)] * fit.log_gap[static_cast<std::size_t>(i)];
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (int i = 0; i < n; ++i) {
    const double yhat = fit.intercept + fit.slope * fit.abscissa[static_cast<std::size_t>(i)];
    const double y = fit.log_gap[static_cast<std::size_t>(i)];
    ss_res += (y - yhat) * (y - yhat);
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace ptspec::sweep
