#pragma once

#include "mvlpe/common.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mvlpe {

/// A collection of m feature matrices over the same N samples.
/// Samples are matrix columns: view v is D_v x N.
struct MultiViewDataset {
  std::vector<Matrix> views;
  std::vector<int> labels;               // dense, re-indexed to [0, C)
  std::vector<std::string> view_names;
  std::vector<std::string> label_names;  // original label text, index = dense id

  int n_views() const { return static_cast<int>(views.size()); }
  int n_samples() const { return views.empty() ? 0 : static_cast<int>(views[0].cols()); }
  int n_classes() const;

  // Throws ShapeError/DataError-style exceptions when an invariant fails.
  void validate() const;
};

struct SplitPlan {
  std::vector<int> train_indices;  // sorted ascending
  std::vector<int> test_indices;   // sorted ascending
  std::uint64_t seed = 0;
  double fraction = 0.5;
};

struct ViewSpec {
  int dim = 2;
  double noise_sigma = 0.0;
};

/// Reads a dataset directory: meta.json, one CSV per view (samples as
/// rows; transposed on load), labels.csv with one label per line.
MultiViewDataset load_dataset(const std::filesystem::path& dir);

/// Inverse of load_dataset. Values are written with round-trip precision.
void write_dataset(const MultiViewDataset& ds, const std::filesystem::path& dir);

/// Deterministic train/test split; |train| = round(fraction * n).
SplitPlan make_split(int n, double fraction, std::uint64_t seed);

/// Seeded generator: class centroids in a shared latent space, each view
/// a random linear image of the latent points plus Gaussian noise.
MultiViewDataset synth_multiview(int n_per_class, int n_classes,
                                 const std::vector<ViewSpec>& view_specs,
                                 std::uint64_t seed);

}  // namespace mvlpe
