#include "ptspec/basis.hpp"

#include <cmath>
#include <functional>

namespace ptspec::basis {

namespace {

// c * (-d^2/dx^2) for one scaled 1D factor:
//   <h_m| -d''|h_n> = (n + 1/2) d_{mn} - (1/2) sqrt((n+1)(n+2)) d_{m,n+2} - ...
Eigen::MatrixXd kinetic_1d(int modes, double ell, double coeff) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(modes, modes);
  const double s = coeff / (ell * ell);
  for (int n = 0; n < modes; ++n) K(n, n) = s * (n + 0.5);
  for (int n = 0; n + 2 < modes; ++n) {
    const double v = -0.5 * s * std::sqrt((n + 1.0) * (n + 2.0));
    K(n, n + 2) = v;
    K(n + 2, n) = v;
  }
  return K;
}

}  // namespace

void HermiteBasis::validate() const {
  if (dimension != 1 && dimension != 2)
    throw AssemblyError("basis dimension must be 1 or 2");
  if (modes_per_dim < 4)
    throw AssemblyError("basis needs at least 4 modes per dimension");
  for (int d = 0; d < dimension; ++d)
    if (!(length_scale[static_cast<std::size_t>(d)] > 0.0))
      throw AssemblyError("length scales must be positive");
  if (!(kinetic_coefficient > 0.0))
    throw AssemblyError("kinetic coefficient must be positive");
}

Eigen::MatrixXd kinetic_matrix(const HermiteBasis& basis) {
  basis.validate();
  const int N = basis.modes_per_dim;
  if (basis.dimension == 1)
    return kinetic_1d(N, basis.length_scale[0], basis.kinetic_coefficient);
  const Eigen::MatrixXd K1 =
      kinetic_1d(N, basis.length_scale[0], basis.kinetic_coefficient);
  const Eigen::MatrixXd K2 =
      kinetic_1d(N, basis.length_scale[1], basis.kinetic_coefficient);
  // Kronecker sum K1 (x) I + I (x) K2 with (n1, n2) -> n1 * N + n2
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N * N, N * N);
  for (int m1 = 0; m1 < N; ++m1)
    for (int n1 = 0; n1 < N; ++n1) {
      if (K1(m1, n1) == 0.0) continue;
      for (int k = 0; k < N; ++k) K(m1 * N + k, n1 * N + k) += K1(m1, n1);
    }
  for (int m2 = 0; m2 < N; ++m2)
    for (int n2 = 0; n2 < N; ++n2) {
      if (K2(m2, n2) == 0.0) continue;
      for (int k = 0; k < N; ++k) K(k * N + m2, k * N + n2) += K2(m2, n2);
    }
  return K;
}

Eigen::MatrixXd potential_matrix(const HermiteBasis& basis, const expr::Expr& f,
                                 int quadrature_order) {
  basis.validate();
  const int N = basis.modes_per_dim;
  const int M = quadrature_order > 0 ? quadrature_order
                                     : default_quadrature_order(N);
  const quad::QuadratureRule rule = quad::gauss_hermite(M);
  const Eigen::VectorXd wred = quad::reduced_weights(rule.nodes, M);
  const Eigen::MatrixXd H = quad::hermite_functions(rule.nodes, N);

  if (basis.dimension == 1) {
    const double ell = basis.length_scale[0];
    Eigen::VectorXd fv(M);
    for (int k = 0; k < M; ++k) {
      const double x = ell * rule.nodes[k];
      fv[k] = wred[k] * f.evaluate({&x, 1});
    }
    Eigen::MatrixXd V = H.transpose() * fv.asDiagonal() * H;
    return 0.5 * (V + V.transpose());
  }

  // 2D: V = Phi^T diag(wred_a wred_b f) Phi with Phi = H (x) H, computed
  // without forming Phi: contract the x2 factor first.
  const double l1 = basis.length_scale[0];
  const double l2 = basis.length_scale[1];
  Eigen::MatrixXd G(M, M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      const double p[2] = {l1 * rule.nodes[a], l2 * rule.nodes[b]};
      G(a, b) = wred[a] * wred[b] * f.evaluate({p, 2});
    }
  // T[a]((m2,n2)) = sum_b G(a,b) H(b,m2) H(b,n2)
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(N * N, N * N);
  Eigen::MatrixXd T(M, N * N);
  for (int a = 0; a < M; ++a) {
    Eigen::MatrixXd S = H.transpose() * G.row(a).asDiagonal() * H;  // N x N
    T.row(a) = Eigen::Map<Eigen::RowVectorXd>(S.data(), N * N);
  }
  // V((m1,m2),(n1,n2)) = sum_a H(a,m1) H(a,n1) T(a,(m2,n2))
  for (int m1 = 0; m1 < N; ++m1)
    for (int n1 = 0; n1 < N; ++n1) {
      Eigen::VectorXd col = T.transpose() * H.col(m1).cwiseProduct(H.col(n1));
      // col holds the (m2,n2) block in column-major S order: S(m2,n2) at m2 + N*n2
      for (int m2 = 0; m2 < N; ++m2)
        for (int n2 = 0; n2 < N; ++n2)
          V(m1 * N + m2, n1 * N + n2) = col[m2 + N * n2];
    }
  return 0.5 * (V + V.transpose());
}

namespace {

// golden-section refinement of max |f| along one coordinate
double golden_max_1d(const std::function<double(double)>& g, double lo, double hi) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 80 && b - a > 1e-12 * (1.0 + std::fabs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = g(x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace

double node_sup(const HermiteBasis& basis, const expr::Expr& f,
                int quadrature_order) {
  basis.validate();
  const int M = quadrature_order > 0
                    ? quadrature_order
                    : default_quadrature_order(basis.modes_per_dim);
  const quad::QuadratureRule rule = quad::gauss_hermite(M);

  if (basis.dimension == 1) {
    const double ell = basis.length_scale[0];
    const double hi = ell * rule.nodes[M - 1];
    auto g = [&](double x) { return std::fabs(f.evaluate({&x, 1})); };
    // dense scan, then polish the best bracket
    const int grid = 8192;
    double best = 0.0, best_x = 0.0;
    for (int k = 0; k <= grid; ++k) {
      const double x = -hi + 2.0 * hi * k / grid;
      const double v = g(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    const double step = 2.0 * hi / grid;
    return std::max(best, golden_max_1d(g, best_x - step, best_x + step));
  }

  const double l1 = basis.length_scale[0];
  const double l2 = basis.length_scale[1];
  const double h1 = l1 * rule.nodes[M - 1];
  const double h2 = l2 * rule.nodes[M - 1];
  auto g2 = [&](double x, double y) {
    const double p[2] = {x, y};
    return std::fabs(f.evaluate({p, 2}));
  };
  const int grid = 384;
  double best = 0.0, bx = 0.0, by = 0.0;
  for (int a = 0; a <= grid; ++a)
    for (int b = 0; b <= grid; ++b) {
      const double x = -h1 + 2.0 * h1 * a / grid;
      const double y = -h2 + 2.0 * h2 * b / grid;
      const double v = g2(x, y);
      if (v > best) {
        best = v;
        bx = x;
        by = y;
      }
    }
  // coordinate-descent polish around the best grid point
  const double s1 = 2.0 * h1 / grid, s2 = 2.0 * h2 / grid;
  auto argmax_1d = [&](const std::function<double(double)>& g, double lo,
                       double hi, double* arg) {
    double best_v = -1.0;
    const int fine = 256;
    for (int k = 0; k <= fine; ++k) {
      const double x = lo + (hi - lo) * k / fine;
      const double v = g(x);
      if (v > best_v) {
        best_v = v;
        *arg = x;
      }
    }
    return std::max(best_v, golden_max_1d(g, *arg - (hi - lo) / fine,
                                          *arg + (hi - lo) / fine));
  };
  for (int round = 0; round < 4; ++round) {
    best = std::max(best, argmax_1d([&](double x) { return g2(x, by); },
                                    bx - s1, bx + s1, &bx));
    best = std::max(best, argmax_1d([&](double y) { return g2(bx, y); },
                                    by - s2, by + s2, &by));
  }
  return best;
}

Eigen::VectorXd parity_diagonal(const HermiteBasis& basis,
                                std::array<int, 2> reflect) {
  basis.validate();
  const int N = basis.modes_per_dim;
  auto sign_1d = [N](bool flip) {
    Eigen::VectorXd s(N);
    for (int n = 0; n < N; ++n) s[n] = (flip && (n % 2)) ? -1.0 : 1.0;
    return s;
  };
  if (basis.dimension == 1) return sign_1d(reflect[0] != 0);
  const Eigen::VectorXd s1 = sign_1d(reflect[0] != 0);
  const Eigen::VectorXd s2 = sign_1d(reflect[1] != 0);
  Eigen::VectorXd s(N * N);
  for (int n1 = 0; n1 < N; ++n1)
    for (int n2 = 0; n2 < N; ++n2) s[n1 * N + n2] = s1[n1] * s2[n2];
  return s;
}

void FDGrid::validate() const {
  if (points < 16) throw AssemblyError("FD grid needs at least 16 points");
  if (!(half_width > 0.0)) throw AssemblyError("FD half-width must be positive");
}

Eigen::MatrixXd fd_operator(const FDGrid& grid, const expr::Expr& V,
                            double kinetic_coefficient) {
  grid.validate();
  const int P = grid.points;
  const double h = grid.spacing();
  const double c = kinetic_coefficient / (h * h);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P, P);
  for (int i = 0; i < P; ++i) {
    const double x = grid.point(i);
    A(i, i) = 2.0 * c + V.evaluate({&x, 1});
    if (i + 1 < P) {
      A(i, i + 1) = -c;
      A(i + 1, i) = -c;
    }
  }
  return A;
}

Eigen::VectorXd fd_eigenvalues(const FDGrid& grid, const expr::Expr& V,
                               double kinetic_coefficient) {
  grid.validate();
  const int P = grid.points;
  const double h = grid.spacing();
  const double c = kinetic_coefficient / (h * h);
  Eigen::VectorXd diag(P);
  for (int i = 0; i < P; ++i) {
    const double x = grid.point(i);
    diag[i] = 2.0 * c + V.evaluate({&x, 1});
  }
  const Eigen::VectorXd sub = Eigen::VectorXd::Constant(P - 1, -c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("FD tridiagonal eigensolve failed");
  return es.eigenvalues();
}

Eigen::MatrixXd fd_parity(const FDGrid& grid) {
  grid.validate();
  const int P = grid.points;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(P, P);
  for (int i = 0; i < P; ++i) J(i, P - 1 - i) = 1.0;
  return J;
}

}  // namespace ptspec::basis
