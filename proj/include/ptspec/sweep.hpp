#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ptspec/operator_family.hpp"

// Eigenvalue trajectories of H(eps) over an eps grid: nearest-neighbour
// matching between steps, exceptional-point detection and bisection, and
// the double-well splitting-law fit.

namespace ptspec::sweep {

struct Window {
  enum class Kind { LowestCount, Interval };
  Kind kind = Kind::LowestCount;
  int count = 4;
  double lo = 0.0, hi = 0.0;
};

struct ExceptionalRecord {
  double eps_lo = 0.0, eps_hi = 0.0;  // bracketing grid interval
  int traj_a = 0, traj_b = 0;
  std::complex<double> lambda_at;     // pair location at collision
};

struct SweepTrace {
  std::vector<double> epsilons;
  // trajectories[t][k]: eigenvalue of trajectory t at epsilons[k]
  std::vector<std::vector<std::complex<double>>> trajectories;
  std::vector<bool> real_throughout;
  std::vector<ExceptionalRecord> exceptional_points;
  std::vector<std::string> log;  // matching-ambiguity notes
};

// Full diagonalization at every grid point; trajectories matched between
// consecutive steps by least total squared distance (greedy assignment
// with pairwise-swap repair). Deterministic.
SweepTrace sweep(const family::OperatorFamily& fam, std::span<const double> eps_grid,
                 const Window& window);

struct EpResult {
  double eps_c = 0.0;
  double width = 0.0;
};

// Bisection on the reality indicator max |Im| of the two eigenvalues
// nearest lambda_ref. The pair must be real at bracket_lo and complex at
// bracket_hi, else BracketError.
EpResult locate_exceptional_point(const family::OperatorFamily& fam,
                                  double lambda_ref, double bracket_lo,
                                  double bracket_hi,
                                  double relative_width = 1e-6);

enum class FitAbscissa { InverseParam, InverseParamSquared };

struct SplittingFit {
  double slope = 0.0;       // d ~ exp(slope * x + intercept)
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> abscissa;   // 1/hbar or 1/g^2
  std::vector<double> log_gap;    // log(lambda1 - lambda0)
};

// Least-squares fit of log(lambda1 - lambda0) against 1/hbar (or 1/g^2).
// Each sample's two lowest eigenvalues must be truncation-converged
// (move < 1e-8 relative when the basis grows by 25%), else
// ConvergenceError.
SplittingFit fit_splitting_law(
    const std::function<family::ProblemSpec(double)>& generator,
    std::span<const double> params, FitAbscissa abscissa);

}  // namespace ptspec::sweep
