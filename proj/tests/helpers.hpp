#pragma once

#include <mvlpe/common.hpp>
#include <mvlpe/dataio.hpp>
#include <mvlpe/lowrank.hpp>

#include <Eigen/Dense>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testutil {

using mvlpe::Matrix;
using mvlpe::Vector;

inline Matrix seeded_matrix(int rows, int cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = scale * normal(rng);
  return M;
}

inline Matrix seeded_symmetric(int n, std::uint64_t seed) {
  Matrix A = seeded_matrix(n, n, seed);
  return 0.5 * (A + A.transpose());
}

// Columns form a random n x d orthonormal frame.
inline Matrix random_frame(int n, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(n, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  return Matrix(qr.householderQ()) * Matrix::Identity(n, d);
}

// Largest principal angle (radians) between the row spaces of two d x N
// embeddings.
inline double principal_angle(const Matrix& U1, const Matrix& U2) {
  Eigen::HouseholderQR<Matrix> q1(U1.transpose()), q2(U2.transpose());
  const int d1 = static_cast<int>(U1.rows()), d2 = static_cast<int>(U2.rows());
  Matrix Q1 = Matrix(q1.householderQ()) * Matrix::Identity(U1.cols(), d1);
  Matrix Q2 = Matrix(q2.householderQ()) * Matrix::Identity(U2.cols(), d2);
  Eigen::JacobiSVD<Matrix> svd(Q1.transpose() * Q2);
  const double c = std::min(1.0, svd.singularValues().minCoeff());
  return std::acos(c);
}

// N points equally spaced on a circle of radius r, carried into R^dim by a
// seeded orthonormal map. Circulant neighborhood structure; labels split
// the circle into `classes` contiguous arcs.
inline mvlpe::MultiViewDataset ring_dataset(int n, int dim, int classes, std::uint64_t seed,
                                            double radius = 1.0) {
  Matrix P(2, n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * i / n;
    P(0, i) = radius * std::cos(t);
    P(1, i) = radius * std::sin(t);
  }
  std::mt19937_64 rng(seed);
  Matrix Q = random_frame(dim, 2, rng);
  mvlpe::MultiViewDataset ds;
  ds.views.push_back(Q * P);
  ds.view_names.push_back("ring");
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) ds.labels[i] = std::min(classes - 1, i * classes / n);
  for (int c = 0; c < classes; ++c) ds.label_names.push_back(std::to_string(c));
  return ds;
}

// Smoothed-objective projected-gradient reference solver for the
// per-sample low-rank coding problem:
//   min sum_s phi_eps(sigma_s(Z)) + lambda * sum_i ||x_i - D_i z_i||^2
//   s.t. 1'z_i = 1,
// with phi_eps the Huber smoothing of |.| at eps. Independent of the ADMM
// implementation under test.
inline double projected_gradient_objective(const Matrix& X, const mvlpe::NeighborIndex& nb,
                                           double lambda, int iters, double eps = 1e-3) {
  const int n = static_cast<int>(X.cols());
  const int k = nb.k;
  std::vector<Matrix> dict(n);
  for (int i = 0; i < n; ++i) {
    dict[i].resize(X.rows(), k);
    for (int j = 0; j < k; ++j) dict[i].col(j) = X.col(nb.neighbors[i][j]);
  }
  double dmax = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::JacobiSVD<Matrix> svd(dict[i]);
    const double s = svd.singularValues()(0);
    dmax = std::max(dmax, s * s);
  }
  const double step = 1.0 / (1.0 / eps + 2.0 * lambda * dmax);
  Matrix Z = Matrix::Constant(k, n, 1.0 / k);
  for (int it = 0; it < iters; ++it) {
    Eigen::JacobiSVD<Matrix> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = svd.singularValues();
    Vector g(s.size());
    for (int j = 0; j < s.size(); ++j) g(j) = s(j) < eps ? s(j) / eps : 1.0;
    Matrix grad = svd.matrixU() * g.asDiagonal() * svd.matrixV().transpose();
    for (int i = 0; i < n; ++i)
      grad.col(i) += 2.0 * lambda * dict[i].transpose() * (dict[i] * Z.col(i) - X.col(i));
    Z -= step * grad;
    for (int i = 0; i < n; ++i) Z.col(i).array() += (1.0 - Z.col(i).sum()) / k;
  }
  double fit = 0.0;
  for (int i = 0; i < n; ++i) fit += (X.col(i) - dict[i] * Z.col(i)).squaredNorm();
  return mvlpe::nuclear_norm(Z) + lambda * fit;
}

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("mvlpe_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace testutil
