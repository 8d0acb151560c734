#pragma once

#include "mvlpe/common.hpp"
#include "mvlpe/lowrank.hpp"

namespace mvlpe {

enum class EmbedVariant { direct, linear, kernel };

/// d x N coordinates with the variant's orthogonality constraint:
///   direct:  U U' = I
///   linear:  W'(XX' + eps I)W = I, U = W'X
///   kernel:  b'(KK + eps I)b = I,  U = b'K
struct Embedding {
  Matrix U;
  EmbedVariant variant = EmbedVariant::direct;
  Matrix carrier;      // projection W (D x d) or kernel coefficients beta (N x d)
  Vector eigenvalues;  // the d selected (ascending)
  double objective = 0.0;
};

struct EigenResult {
  Vector values;   // ascending
  Matrix vectors;  // matching orthonormal columns, sign-fixed
};

/// Deterministic smallest eigenpairs of a symmetric matrix. Each vector's
/// largest-magnitude entry is made positive (ties: first such entry);
/// eigenvalues within 1e-10 of each other are ordered by the sign-fixed
/// lexicographic order of their vectors.
EigenResult smallest_eigenvectors(const Matrix& A, int d);

Embedding embed_direct(const ReconstructionMatrix& M, int d);
Embedding embed_linear(const Matrix& X, const ReconstructionMatrix& M, int d, double eps = -1.0);
Embedding embed_kernel(const Matrix& Kphi, const ReconstructionMatrix& M, int d,
                       double eps = -1.0);

}  // namespace mvlpe
