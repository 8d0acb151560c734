#include "mvlpe/lpe.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mvlpe {

namespace {

void fix_sign(Eigen::Ref<Vector> v) {
  int at = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      at = i;
    }
  }
  if (v[at] < 0) v = -v;
}

bool lex_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

// Generalized problem A v = lambda B v with B = base + eps*I reduced to a
// standard symmetric problem via Cholesky; returns carrier columns with
// carrier' B carrier = I.
struct Generalized {
  Matrix carrier;
  Vector values;
};

Generalized solve_generalized(const Matrix& A, const Matrix& base, int d, double eps,
                              double auto_scale) {
  if (eps < 0) eps = 1e-8 * auto_scale;
  double ridge = eps;
  const double ridge_cap = 1e-4 * std::max(auto_scale, 1.0);
  Eigen::LLT<Matrix> llt;
  for (;;) {
    Matrix B = base;
    B.diagonal().array() += ridge;
    llt.compute(B);
    if (llt.info() == Eigen::Success) break;
    ridge = ridge > 0 ? ridge * 10 : 1e-12 * std::max(auto_scale, 1.0);
    if (ridge > ridge_cap)
      throw NumericError("constraint matrix not positive definite after ridge escalation");
  }
  const Matrix Linv_A = llt.matrixL().solve(A);
  Matrix C = llt.matrixL().solve(Linv_A.transpose());
  EigenResult eig = smallest_eigenvectors(C, d);
  Generalized g;
  g.values = eig.values;
  g.carrier = llt.matrixU().solve(eig.vectors);
  return g;
}

Matrix structure_matrix(const ReconstructionMatrix& M) {
  Matrix ImM = Matrix::Identity(M.M.rows(), M.M.cols()) - M.M;
  return ImM.transpose() * ImM;
}

}  // namespace

EigenResult smallest_eigenvectors(const Matrix& A, int d) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw ArgumentError("smallest_eigenvectors: matrix must be square");
  if (d < 1 || d > n) throw ArgumentError("smallest_eigenvectors: need 1 <= d <= N");
  if (!A.allFinite()) throw DataError("smallest_eigenvectors: non-finite matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver((A + A.transpose()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw NumericError("smallest_eigenvectors: eigendecomposition failed");

  EigenResult out;
  out.values = solver.eigenvalues().head(d);
  out.vectors = solver.eigenvectors().leftCols(d);
  for (int j = 0; j < d; ++j) fix_sign(out.vectors.col(j));

  // Deterministic order inside (near-)degenerate groups.
  int lo = 0;
  while (lo < d) {
    int hi = lo + 1;
    while (hi < d && out.values[hi] - out.values[hi - 1] <= 1e-10) ++hi;
    if (hi - lo > 1) {
      std::vector<int> order(hi - lo);
      std::iota(order.begin(), order.end(), lo);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return lex_less(out.vectors.col(a), out.vectors.col(b));
      });
      Matrix cols(n, hi - lo);
      Vector vals(hi - lo);
      for (int t = 0; t < hi - lo; ++t) {
        cols.col(t) = out.vectors.col(order[t]);
        vals[t] = out.values[order[t]];
      }
      out.vectors.middleCols(lo, hi - lo) = cols;
      out.values.segment(lo, hi - lo) = vals;
    }
    lo = hi;
  }
  return out;
}

Embedding embed_direct(const ReconstructionMatrix& M, int d) {
  const int n = static_cast<int>(M.M.rows());
  if (d > n) throw ArgumentError("embed_direct: d must not exceed N");
  EigenResult eig = smallest_eigenvectors(structure_matrix(M), d);
  Embedding e;
  e.variant = EmbedVariant::direct;
  e.U = eig.vectors.transpose();
  e.eigenvalues = eig.values;
  e.objective = eig.values.sum();
  return e;
}

Embedding embed_linear(const Matrix& X, const ReconstructionMatrix& M, int d, double eps) {
  const int dim = static_cast<int>(X.rows());
  const int n = static_cast<int>(X.cols());
  if (d > std::min(dim, n)) throw ArgumentError("embed_linear: d must not exceed min(D, N)");
  const Matrix A = X * structure_matrix(M) * X.transpose();
  const Matrix base = X * X.transpose();
  Generalized g = solve_generalized(A, base, d, eps, base.trace() / dim);
  Embedding e;
  e.variant = EmbedVariant::linear;
  e.carrier = g.carrier;
  e.U = g.carrier.transpose() * X;
  e.eigenvalues = g.values;
  e.objective = g.values.sum();
  return e;
}

Embedding embed_kernel(const Matrix& Kphi, const ReconstructionMatrix& M, int d, double eps) {
  const int n = static_cast<int>(Kphi.rows());
  if (d > n) throw ArgumentError("embed_kernel: d must not exceed N");
  if ((Kphi - Kphi.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, Kphi.cwiseAbs().maxCoeff()))
    throw ArgumentError("embed_kernel: kernel matrix must be symmetric");
  const Matrix Ks = (Kphi + Kphi.transpose()) / 2.0;
  const Matrix A = Ks * structure_matrix(M) * Ks;
  const Matrix base = Ks * Ks;
  Generalized g = solve_generalized(A, base, d, eps, base.trace() / n);
  Embedding e;
  e.variant = EmbedVariant::kernel;
  e.carrier = g.carrier;
  e.U = g.carrier.transpose() * Ks;
  e.eigenvalues = g.values;
  e.objective = g.values.sum();
  return e;
}

}  // namespace mvlpe
