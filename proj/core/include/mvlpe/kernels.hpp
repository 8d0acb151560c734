#pragma once

#include "mvlpe/common.hpp"

namespace mvlpe {

enum class KernelKind { gaussian, linear, polynomial };

struct KernelParams {
  // Gaussian bandwidth; <= 0 selects the median-distance heuristic.
  double sigma = 0.0;
  // Polynomial kernel (x'y + offset)^degree.
  double degree = 2.0;
  double offset = 1.0;
};

constexpr double kAutoSigma = 0.0;

struct SimilarityMatrix {
  Matrix values;  // N x N, symmetric
  KernelKind kind = KernelKind::gaussian;
  double sigma = 1.0;  // bandwidth actually used (gaussian)
  double degree = 2.0;
  double offset = 1.0;
};

/// Median of all pairwise Euclidean distances (lower median), falling
/// back to 1 when the median is 0.
double median_bandwidth(const Matrix& points);

/// Builds the N x N similarity matrix of d x N column points.
/// Any numerical asymmetry is symmetrized as (K + K') / 2.
SimilarityMatrix similarity_matrix(const Matrix& points, KernelKind kind,
                                   const KernelParams& params = {});

/// D - K with D the diagonal of row sums. Row sums of the result are zero;
/// for nonnegative similarities the result is PSD.
Matrix graph_laplacian(const SimilarityMatrix& K);

}  // namespace mvlpe
