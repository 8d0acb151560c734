#include "mvlpe/lowrank.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mvlpe {

NeighborIndex knn_neighbors(const Matrix& X, int k) {
  const int n = static_cast<int>(X.cols());
  if (k < 1 || k > n - 1)
    throw ArgumentError("knn_neighbors: K must satisfy 1 <= K <= N-1, got K=" +
                        std::to_string(k) + ", N=" + std::to_string(n));
  NeighborIndex idx;
  idx.k = k;
  idx.neighbors.assign(n, {});
  parallel_for(n, [&](int i) {
    std::vector<std::pair<double, int>> cand;
    cand.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back((X.col(i) - X.col(j)).squaredNorm(), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    idx.neighbors[i].resize(k);
    for (int t = 0; t < k; ++t) idx.neighbors[i][t] = cand[t].second;
  });
  return idx;
}

double nuclear_norm(const Matrix& Z) {
  return Eigen::JacobiSVD<Matrix>(Z).singularValues().sum();
}

double lowrank_objective(const Matrix& X, const NeighborIndex& neighbors, const Matrix& Z,
                         double lambda) {
  double err = 0.0;
  for (int i = 0; i < static_cast<int>(X.cols()); ++i) {
    Vector r = X.col(i);
    const auto& nb = neighbors.neighbors[i];
    for (size_t t = 0; t < nb.size(); ++t) r -= Z(static_cast<int>(t), i) * X.col(nb[t]);
    err += r.squaredNorm();
  }
  return nuclear_norm(Z) + lambda * err;
}

LowRankCode solve_lowrank_codes(const Matrix& X, const NeighborIndex& neighbors,
                                double lambda, const SolverOpts& opts) {
  if (lambda <= 0) throw ArgumentError("solve_lowrank_codes: lambda must be positive");
  if (opts.mu <= 0 || opts.tol <= 0 || opts.max_iters < 1)
    throw ArgumentError("solve_lowrank_codes: invalid solver options");
  const int n = static_cast<int>(X.cols());
  const int k = neighbors.k;

  // Per-column normal matrices S_i = 2*lambda*D_i'D_i + mu*I, factored once.
  std::vector<Matrix> dicts(n);
  std::vector<Eigen::LDLT<Matrix>> factors(n);
  parallel_for(n, [&](int i) {
    Matrix D(X.rows(), k);
    for (int t = 0; t < k; ++t) D.col(t) = X.col(neighbors.neighbors[i][t]);
    Matrix S = 2.0 * lambda * D.transpose() * D;
    S.diagonal().array() += opts.mu;
    Eigen::LDLT<Matrix> ldlt(S);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0)) {
      // duplicate neighbors can make D'D singular; trace-scaled ridge
      S.diagonal().array() += 1e-10 * S.trace() / k;
      ldlt.compute(S);
      if (ldlt.info() != Eigen::Success)
        throw NumericError("solve_lowrank_codes: singular system for sample " +
                           std::to_string(i));
    }
    dicts[i] = std::move(D);
    factors[i] = std::move(ldlt);
  });

  LowRankCode code;
  code.neighbors = neighbors;
  Matrix Z = Matrix::Constant(k, n, 1.0 / k);
  Matrix J = Z;
  Matrix Y = Matrix::Zero(k, n);
  const Vector ones = Vector::Ones(k);

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    // z_i update: equality-constrained least squares, multiplier in closed form
    parallel_for(n, [&](int i) {
      Vector rhs = 2.0 * lambda * dicts[i].transpose() * X.col(i) + opts.mu * J.col(i) - Y.col(i);
      Vector a = factors[i].solve(rhs);
      Vector b = factors[i].solve(ones);
      const double nu = (1.0 - a.sum()) / b.sum();
      Z.col(i) = a + nu * b;
    });
    // J update: SVT of Z + Y/mu at 1/mu
    Eigen::JacobiSVD<Matrix> svd(Z + Y / opts.mu, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = (svd.singularValues().array() - 1.0 / opts.mu).max(0.0);
    J = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
    Y += opts.mu * (Z - J);
    if (!Z.allFinite() || !J.allFinite())
      throw NumericError("solve_lowrank_codes: non-finite iterate; try a smaller mu");
    if ((Z - J).norm() / std::max(1.0, Z.norm()) < opts.tol) {
      code.converged = true;
      ++it;
      break;
    }
  }
  code.solver_iters = it;
  code.Z = std::move(Z);
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    err += (X.col(i) - dicts[i] * code.Z.col(i)).squaredNorm();
  code.residual_norm = std::sqrt(err);
  return code;
}

ReconstructionMatrix assemble_reconstruction_matrix(const LowRankCode& code, int n) {
  ReconstructionMatrix rec;
  rec.M = Matrix::Zero(n, n);
  for (int i = 0; i < code.neighbors.n(); ++i) {
    const auto& nb = code.neighbors.neighbors[i];
    for (size_t t = 0; t < nb.size(); ++t) {
      if (nb[t] < 0 || nb[t] >= n)
        throw ArgumentError("assemble_reconstruction_matrix: neighbor index " +
                            std::to_string(nb[t]) + " out of range for n=" + std::to_string(n));
      rec.M(nb[t], i) = code.Z(static_cast<int>(t), i);
    }
  }
  return rec;
}

}  // namespace mvlpe
