#pragma once

#include "mvlpe/common.hpp"

#include <vector>

namespace mvlpe {

/// Per-sample k-NN dictionaries (self excluded), sorted by ascending
/// distance with exact ties broken by the lower sample index.
struct NeighborIndex {
  std::vector<std::vector<int>> neighbors;  // N lists of K indices
  int k = 0;
  int n() const { return static_cast<int>(neighbors.size()); }
};

struct SolverOpts {
  double mu = 1.0;
  double tol = 1e-6;
  int max_iters = 500;
};

/// Per-sample codes over k-NN dictionaries: column i of Z (K x N) codes
/// sample i, with 1'z_i = 1.
struct LowRankCode {
  Matrix Z;
  NeighborIndex neighbors;
  double residual_norm = 0.0;  // ||E||_F at exit
  int solver_iters = 0;
  bool converged = false;
};

struct ReconstructionMatrix {
  Matrix M;  // N x N, column i = Z_i scattered to neighbor rows
};

NeighborIndex knn_neighbors(const Matrix& X, int k);

/// ADMM for  min ||Z||_* + lambda * sum_i ||x_i - Xt_i z_i||^2
///           s.t. 1'z_i = 1,
/// splitting Z = J with singular-value thresholding on the J block and a
/// closed-form equality-constrained least squares on each z column.
LowRankCode solve_lowrank_codes(const Matrix& X, const NeighborIndex& neighbors,
                                double lambda, const SolverOpts& opts = {});

ReconstructionMatrix assemble_reconstruction_matrix(const LowRankCode& code, int n);

/// Sum of singular values.
double nuclear_norm(const Matrix& Z);

/// ||Z||_* + lambda * ||E||_F^2 for the given codes.
double lowrank_objective(const Matrix& X, const NeighborIndex& neighbors, const Matrix& Z,
                         double lambda);

}  // namespace mvlpe
