#include <doctest.h>

#include <cmath>
#include <random>

#include "ptspec/criteria.hpp"
#include "ptspec/grushin.hpp"

using namespace ptspec;
using expr::Expr;
using family::OperatorFamily;
using family::ProblemSpec;
using grushin::Complex;
using grushin::GrushinOperators;

TEST_SUITE_BEGIN("grushin");

namespace {

ProblemSpec oscillator_2d(int modes) {
  ProblemSpec spec;
  spec.dimension = 2;
  spec.basis = {2, modes, {1.0, 1.0 / std::sqrt(2.0)}, 0.5};
  spec.potential = Expr::parse("(x1^2 + 4*x2^2)/2", 2);
  spec.perturbation = Expr::parse("x1^2*x2/(1+x1^2+x2^2)", 2);
  spec.reflection = {0, 1};
  return spec;
}

ProblemSpec harmonic_1d(int modes) {
  ProblemSpec spec;
  spec.dimension = 1;
  spec.basis = {1, modes, {1.0, 1.0}, 0.5};
  spec.potential = Expr::parse("x^2/2", 1);
  spec.perturbation = Expr::parse("x/(1+x^2)", 1);
  spec.reflection = {1, 0};
  return spec;
}

const double kClusterTol = 1e-7;

struct OscillatorBlock {
  OperatorFamily fam;
  GrushinOperators g;
  OscillatorBlock() : fam(family::assemble(oscillator_2d(16))), g(fam, 3.5, kClusterTol) {}
};

OscillatorBlock& oscillator_block() {
  static OscillatorBlock ctx;
  return ctx;
}

}  // namespace

TEST_CASE("spectral projector cluster sizes") {
  auto& ctx = oscillator_block();
  const auto cluster = grushin::spectral_projector(ctx.fam, 3.5, kClusterTol);
  CHECK(cluster.vectors.size() == 2);
  CHECK(cluster.lambda_mean == doctest::Approx(3.5).epsilon(1e-12));
  // projector is idempotent and rank 2
  const Eigen::MatrixXd p = cluster.projector;
  CHECK((p * p - p).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(p.trace() == doctest::Approx(2.0).epsilon(1e-12));

  const OperatorFamily h1d = family::assemble(harmonic_1d(14));
  CHECK(grushin::spectral_projector(h1d, 0.5, kClusterTol).vectors.size() == 1);
  CHECK_THROWS_AS(grushin::spectral_projector(h1d, 0.9, kClusterTol),
                  MultiplicityError);
  try {
    grushin::spectral_projector(h1d, 0.9, kClusterTol);
  } catch (const MultiplicityError& e) {
    CHECK(e.count == 0);
  }
}

TEST_CASE("canonical tau basis on the degenerate pair") {
  auto& ctx = oscillator_block();
  const auto& block = ctx.g.block();
  CHECK(block.tau1 == 1.0);
  CHECK(block.tau2 == -1.0);
  CHECK(block.tau_product() == -1.0);
  // J e_j = tau_j e_j and orthonormality
  CHECK((ctx.fam.j * block.e1 - block.tau1 * block.e1).norm() <= 1e-10);
  CHECK((ctx.fam.j * block.e2 - block.tau2 * block.e2).norm() <= 1e-10);
  CHECK(std::fabs(block.e1.dot(block.e2)) <= 1e-10);
  CHECK(block.e1.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tau signature for two even states") {
  const OperatorFamily h1d = family::assemble(harmonic_1d(14));
  const auto dec = linalg::eig_symmetric(h1d.h0);
  const Eigen::VectorXd v0 = dec.eigenvectors.col(0).real();
  const Eigen::VectorXd v2 = dec.eigenvectors.col(2).real();
  const auto tb = grushin::canonical_tau_basis(v0, v2, h1d.j);
  CHECK(tb.tau1 == 1.0);
  CHECK(tb.tau2 == 1.0);
}

TEST_CASE("tau signature is invariant under recombination") {
  auto& ctx = oscillator_block();
  const auto cluster = grushin::spectral_projector(ctx.fam, 3.5, kClusterTol);
  const Eigen::VectorXd v1 = cluster.vectors[0];
  const Eigen::VectorXd v2 = cluster.vectors[1];
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    Eigen::Matrix2d m;
    m << u(rng), u(rng), u(rng), u(rng);
    if (std::fabs(m.determinant()) < 0.1) continue;
    const Eigen::VectorXd w1 = m(0, 0) * v1 + m(0, 1) * v2;
    const Eigen::VectorXd w2 = m(1, 0) * v1 + m(1, 1) * v2;
    const auto tb = grushin::canonical_tau_basis(w1.normalized(), w2.normalized(),
                                                 ctx.fam.j);
    CHECK(tb.tau1 * tb.tau2 == -1.0);  // multiset {+1, -1} in canonical order
    CHECK(tb.tau1 == 1.0);
  }
  // rotated pair (v1 +- v2)/sqrt(2)
  const auto tb = grushin::canonical_tau_basis(
      ((v1 + v2) / std::sqrt(2.0)).eval(), ((v1 - v2) / std::sqrt(2.0)).eval(),
      ctx.fam.j);
  CHECK(tb.tau_product() == -1.0);
}

TEST_CASE("degenerate form is rejected") {
  auto& ctx = oscillator_block();
  const auto cluster = grushin::spectral_projector(ctx.fam, 3.5, kClusterTol);
  // restriction of J to a span mixing the two parities equally is singular
  const Eigen::VectorXd e_even = ctx.g.block().e1;
  const Eigen::VectorXd e_odd = ctx.g.block().e2;
  const Eigen::VectorXd w1 = ((e_even + e_odd) / std::sqrt(2.0)).eval();
  const Eigen::VectorXd w2 = w1;
  CHECK_THROWS_AS(grushin::canonical_tau_basis(w1, w2, ctx.fam.j),
                  DegenerateFormError);
}

TEST_CASE("effective matrix structure on the mixed-parity block") {
  auto& ctx = oscillator_block();
  const Eigen::Matrix2cd h1 = ctx.g.block().h1_block;
  CHECK(std::abs(h1(0, 0)) <= 1e-10);
  CHECK(std::abs(h1(1, 1)) <= 1e-10);
  // H1 = i W with real W and opposite parities: purely imaginary coupling
  CHECK(std::abs(h1(0, 1).real()) <= 1e-12);
  CHECK(std::abs(h1(0, 1).imag()) > 1e-3);
  CHECK(std::abs(h1(1, 0) - std::conj(-h1(0, 1))) <= 1e-10);
}

TEST_CASE("effective matrix is Hermitian for a tau-product +1 pair") {
  // two even harmonic states with a J-commuting real symmetric H1
  const int n = 14;
  ProblemSpec spec = harmonic_1d(n);
  const OperatorFamily base = family::assemble(spec);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if ((i + j) % 2 == 0) a(i, j) = a(j, i) = u(rng);
  const auto dec = linalg::eig_symmetric(base.h0);
  grushin::DegenerateBlock block;
  block.lambda0 = 0.5 * (dec.eigenvalues[0].real() + dec.eigenvalues[2].real());
  const auto tb = grushin::canonical_tau_basis(dec.eigenvectors.col(0).real(),
                                               dec.eigenvectors.col(2).real(),
                                               base.j);
  block.e1 = tb.e1;
  block.e2 = tb.e2;
  block.tau1 = tb.tau1;
  block.tau2 = tb.tau2;
  family::OperatorFamily fam = base;
  fam.h1 = a.cast<Complex>();
  fam.pt_form = false;
  const Eigen::Matrix2cd h1 = grushin::effective_matrix(block, fam);
  CHECK((h1 - h1.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);

  fam.h1 = Eigen::MatrixXcd::Zero(n, n);
  const Eigen::Matrix2cd zero = grushin::effective_matrix(block, fam);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grushin algebra: R+ R- = I and R+ E0 = 0") {
  auto& ctx = oscillator_block();
  const Eigen::MatrixXd rp = ctx.g.r_plus();
  const Eigen::MatrixXd rm = ctx.g.r_minus();
  CHECK((rp * rm - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::MatrixXcd x =
      ctx.g.e0_apply(Complex(3.52, 0.01), rm.cast<Complex>());
  CHECK((rp.cast<Complex>() * x).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("series endpoints") {
  auto& ctx = oscillator_block();
  const Complex z(3.52, 0.03);
  // eps = 0 reduces to (z - lambda0) I exactly
  const auto zero = grushin::e_minus_plus_series(ctx.g, ctx.fam, 0.0, z, 6);
  const Eigen::Matrix2cd want =
      (z - ctx.g.lambda0()) * Eigen::Matrix2cd::Identity();
  CHECK((zero.value - want).cwiseAbs().maxCoeff() <= 1e-15);

  // order 1 is (z - lambda0) I - eps H1_block
  const double eps = 1e-2;
  const auto first = grushin::e_minus_plus_series(ctx.g, ctx.fam, eps, z, 1);
  const Eigen::Matrix2cd expect = want - eps * ctx.g.block().h1_block;
  CHECK((first.value - expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("series agrees with the exact bordered solve within its tail bound") {
  auto& ctx = oscillator_block();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double radius = 0.25 / ctx.g.norm_R();
  // allowance for bordered-LU roundoff against ||H0||
  const double floor_noise = 256.0 * std::numeric_limits<double>::epsilon() *
                             (1.0 + ctx.fam.h0.cwiseAbs().maxCoeff());
  for (int trial = 0; trial < 20; ++trial) {
    const double eps = 0.02 * u(rng);
    const Complex z = Complex(3.5, 0.0) + radius * Complex(u(rng), u(rng));
    const auto series = grushin::e_minus_plus_series(ctx.g, ctx.fam, eps, z, 10);
    const Eigen::Matrix2cd exact =
        grushin::e_minus_plus_exact(ctx.g, ctx.fam, eps, z);
    CHECK((series.value - exact).norm() <= series.tail_bound + floor_noise);
  }
}

TEST_CASE("exact block at eps = 0") {
  auto& ctx = oscillator_block();
  const Complex z(3.55, -0.02);
  const Eigen::Matrix2cd e = grushin::e_minus_plus_exact(ctx.g, ctx.fam, 0.0, z);
  CHECK((e - (z - 3.5) * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <=
        1e-10);
}

TEST_CASE("series diverges outside the contraction region") {
  auto& ctx = oscillator_block();
  // eps far too large: K = |eps| ||H1|| ||E0|| >= 1
  CHECK_THROWS_AS(
      grushin::e_minus_plus_series(ctx.g, ctx.fam, 50.0, Complex(3.5, 0.0), 4),
      DivergenceError);
}

TEST_CASE("resolvent norm bound from the gap") {
  auto& ctx = oscillator_block();
  const double r = ctx.g.norm_R();
  CHECK(r == doctest::Approx(1.0).epsilon(1e-9));  // nearest levels at 2.5, 4.5
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = ctx.fam.size();
  for (int trial = 0; trial < 4; ++trial) {
    const Complex z = Complex(3.5, 0.0) + 0.3 * Complex(u(rng), u(rng));
    const Eigen::MatrixXcd e0 =
        ctx.g.e0_apply(z, Eigen::MatrixXcd::Identity(n, n));
    const double bound = r / (1.0 - std::abs(z - Complex(3.5, 0.0)) * r);
    CHECK(linalg::op_norm(e0) <= bound * (1.0 + 1e-8));
  }
}

TEST_CASE("symmetry identity of the reduced block") {
  auto& ctx = oscillator_block();
  const double eps = 1e-2;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const Complex z = Complex(3.5, 0.0) + 0.2 * Complex(u(rng), u(rng));
    CHECK(grushin::symmetry_check(ctx.g, ctx.fam, eps, z) <= 1e-9);
  }
  // real z, tau product -1: real diagonal, antihermitian off-diagonal
  const Complex zr(3.47, 0.0);
  const Eigen::Matrix2cd e = grushin::e_minus_plus_exact(ctx.g, ctx.fam, eps, zr);
  CHECK(std::fabs(e(0, 0).imag()) <= 1e-9);
  CHECK(std::fabs(e(1, 1).imag()) <= 1e-9);
  CHECK(std::abs(e(0, 1) + std::conj(e(1, 0))) <= 1e-9);
  CHECK(grushin::symmetry_check(ctx.g, ctx.fam, 0.0, zr) <= 1e-12);
}

TEST_CASE("eigenvalues_near matches full diagonalization") {
  auto& ctx = oscillator_block();
  const double eps = 1e-2;
  const auto pair = grushin::eigenvalues_near(ctx.g, ctx.fam, eps);
  CHECK(pair.classification == grushin::PairClass::ComplexConjugatePair);
  CHECK(pair.z_plus == std::conj(pair.z_minus));

  const auto full = linalg::eig_complex(family::evaluate_at(ctx.fam, eps));
  double d_plus = 1e9, d_minus = 1e9;
  for (Eigen::Index i = 0; i < full.eigenvalues.size(); ++i) {
    d_plus = std::min(d_plus, std::abs(full.eigenvalues[i] - pair.z_plus));
    d_minus = std::min(d_minus, std::abs(full.eigenvalues[i] - pair.z_minus));
  }
  CHECK(d_plus <= 1e-8);
  CHECK(d_minus <= 1e-8);

  // first-order theory: 3.5 +- i eps w
  const double w = std::abs(ctx.g.block().h1_block(0, 1));
  const Complex top = pair.z_plus.imag() >= 0.0 ? pair.z_plus : pair.z_minus;
  CHECK(std::abs(top - Complex(3.5, eps * w)) <= 5.0 * eps * eps);

  const auto at_zero = grushin::eigenvalues_near(ctx.g, ctx.fam, 0.0);
  CHECK(at_zero.classification == grushin::PairClass::RealPair);
  CHECK(at_zero.z_plus == Complex(ctx.g.lambda0(), 0.0));
}

TEST_CASE("pair stays real when tau product is +1") {
  // user H1: J-commuting real symmetric perturbation on the 2D block
  auto& ctx = oscillator_block();
  const int n = ctx.fam.size();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (ctx.fam.j(i, i) == ctx.fam.j(j, j)) a(i, j) = a(j, i) = 0.3 * u(rng);
  family::OperatorFamily fam = ctx.fam;
  fam.h1 = a.cast<Complex>();
  fam.pt_form = false;
  GrushinOperators g(fam, 3.5, kClusterTol);
  CHECK(g.block().tau_product() == -1.0);
  const auto pair = grushin::eigenvalues_near(g, fam, 1e-2);
  // J-commuting real H1 keeps the problem self-adjoint: real pair
  CHECK(pair.classification == grushin::PairClass::RealPair);
}

TEST_CASE("winding count certifies two roots in the disk") {
  auto& ctx = oscillator_block();
  const double radius = 0.25 / ctx.g.norm_R();
  CHECK(grushin::winding_number(ctx.g, ctx.fam, 1e-2, radius) == 2);
  CHECK(grushin::winding_number(ctx.g, ctx.fam, 0.0, radius) == 2);
}

TEST_SUITE_END();
