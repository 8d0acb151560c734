#pragma once

#include "mvlpe/common.hpp"
#include "mvlpe/dataio.hpp"
#include "mvlpe/kernels.hpp"
#include "mvlpe/lpe.hpp"
#include "mvlpe/lowrank.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mvlpe {

struct MvLpeConfig {
  int d_star = 2;
  std::vector<int> d_view;  // empty: every view uses d_star
  double gamma = 1.0;
  double p = 1.0;
  EmbedVariant variant = EmbedVariant::direct;
  KernelKind view_kernel = KernelKind::gaussian;
  KernelParams view_kernel_params;
  KernelKind centroid_kernel = KernelKind::gaussian;
  KernelParams centroid_kernel_params;
  int knn = 0;  // 0: min(10, N-1)
  double lambda = 1.0;
  SolverOpts admm;
  int max_outer_iters = 50;
  double outer_tol = 1e-6;
  std::uint64_t seed = 0;

  int knn_for(int n_samples) const;
  int d_view_for(int view) const;
  void validate() const;
};

struct ViewWeights {
  Vector w;  // positive, sums to 1
  // All disagreement traces hit the clamp floor (views perfectly
  // consistent); weights fell back to uniform.
  bool all_clamped = false;
};

struct MvLpeModel {
  Matrix u_star;  // d* x N, rows orthonormal
  std::vector<Embedding> view_embeddings;
  ViewWeights weights;
  std::vector<double> objective_trace;
  std::vector<std::vector<double>> disagreement_trace;  // [iter][view]
  bool converged = false;
  int iters = 0;
  MvLpeConfig config;
};

/// Rows = d* smallest eigenvectors of sum_v w_v L_v.
Matrix update_centroid(const std::vector<Matrix>& laplacians, const ViewWeights& weights,
                       int d_star);

/// d_v smallest eigenvectors of (I-M)'(I-M) + gamma * w_v * L_star.
Embedding update_view_embedding(const ReconstructionMatrix& M, const Matrix& L_star,
                                double w_v, double gamma, int d_v);

/// w_v proportional to tr(U* L_v U*')^(p/2 - 1), normalized to sum 1.
/// Traces below 1e-12 are clamped before exponentiation.
ViewWeights update_weights(const Matrix& u_star, const std::vector<Matrix>& laplacians,
                           double p);

/// gamma * sum_v w_v tr(U* L_v U*') + sum_v tr(psi_v A_v psi_v') where
/// A_v = (I-M_v)'(I-M_v). Embeddings are gated on row-orthonormality.
double joint_objective(const Matrix& u_star, const std::vector<Embedding>& psis,
                       const std::vector<Matrix>& structure_matrices,
                       const std::vector<Matrix>& view_laplacians, const ViewWeights& weights,
                       double gamma);

/// The alternating optimizer: per-view low-rank structure and similarity
/// Laplacians are built once, then centroid, per-view embeddings, and
/// weights alternate until the objective settles.
MvLpeModel fit(const MultiViewDataset& dataset, const MvLpeConfig& config);

// --- JSON (documented schema; unknown keys rejected) ---
MvLpeConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const MvLpeConfig& config);
MvLpeConfig load_config(const std::filesystem::path& path);

void save_model(const MvLpeModel& model, const std::filesystem::path& path);
MvLpeModel load_model(const std::filesystem::path& path);

}  // namespace mvlpe
