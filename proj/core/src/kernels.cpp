#include "mvlpe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mvlpe {

namespace {

// Squared pairwise distances, row-parallel with a fixed per-row order.
Matrix squared_distances(const Matrix& points) {
  const int n = static_cast<int>(points.cols());
  Matrix d2(n, n);
  parallel_for(n, [&](int i) {
    d2(i, i) = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      d2(i, j) = (points.col(i) - points.col(j)).squaredNorm();
    }
  });
  return d2;
}

void check_finite(const Matrix& points) {
  if (!points.allFinite()) throw DataError("similarity_matrix: non-finite input points");
}

}  // namespace

double median_bandwidth(const Matrix& points) {
  check_finite(points);
  const int n = static_cast<int>(points.cols());
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) dists.push_back((points.col(i) - points.col(j)).norm());
  if (dists.empty()) return 1.0;
  std::sort(dists.begin(), dists.end());
  const double med = dists[(dists.size() - 1) / 2];  // lower median
  return med > 0.0 ? med : 1.0;
}

SimilarityMatrix similarity_matrix(const Matrix& points, KernelKind kind,
                                   const KernelParams& params) {
  if (points.cols() < 2) throw ArgumentError("similarity_matrix needs at least 2 points");
  check_finite(points);
  const int n = static_cast<int>(points.cols());
  SimilarityMatrix K;
  K.kind = kind;
  K.degree = params.degree;
  K.offset = params.offset;
  switch (kind) {
    case KernelKind::gaussian: {
      double sigma = params.sigma;
      if (sigma < 0.0) throw ArgumentError("gaussian sigma must be positive or AUTO");
      if (sigma == kAutoSigma) sigma = median_bandwidth(points);
      K.sigma = sigma;
      Matrix d2 = squared_distances(points);
      K.values = (-d2 / (2.0 * sigma * sigma)).array().exp();
      break;
    }
    case KernelKind::linear:
      K.values = points.transpose() * points;
      break;
    case KernelKind::polynomial:
      K.values = ((points.transpose() * points).array() + params.offset).pow(params.degree);
      break;
  }
  K.values = ((K.values + K.values.transpose()) / 2.0).eval();
  return K;
}

Matrix graph_laplacian(const SimilarityMatrix& K) {
  if (!K.values.allFinite()) throw DataError("graph_laplacian: non-finite similarity");
  Matrix L = -K.values;
  L.diagonal() += K.values.rowwise().sum();
  return L;
}

}  // namespace mvlpe
