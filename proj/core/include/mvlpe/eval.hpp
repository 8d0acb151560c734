#pragma once

#include "mvlpe/common.hpp"
#include "mvlpe/dataio.hpp"
#include "mvlpe/mvlpe.hpp"

#include <string>
#include <vector>

namespace mvlpe {

enum class Method { mvlpe, ble, cle };

Method method_from_string(const std::string& s);
std::string method_to_string(Method m);

/// Engine for the single-view baselines: low-rank preserving embedding
/// (the repo default) or a plain Laplacian-eigenmap parity mode.
enum class BaselineEngine { lpe, le };

struct ExperimentReport {
  std::string method;
  int dims = 0;
  int repeats = 0;
  std::vector<double> accuracies;        // per completed repeat, in repeat order
  std::vector<std::uint64_t> seeds;      // split seed per repeat
  double mean_acc = 0.0;
  double max_acc = 0.0;
  Vector per_view_weights_summary;       // mvlpe only: mean final weights
  double wallclock_seconds = 0.0;
  int failed = 0;                        // repeats that raised an error
};

struct BaselineEmbeddings {
  Embedding ble;
  int best_view = 0;  // view selected by train-side leave-one-out 1NN
  Embedding cle;
  std::vector<Embedding> per_view;
};

/// 1NN with Euclidean distance; ties go to the lower train sample index.
/// train_labels[i] labels train_indices[i].
std::vector<int> one_nn_classify(const Matrix& embedding, const std::vector<int>& train_indices,
                                 const std::vector<int>& train_labels,
                                 const std::vector<int>& test_indices);

/// BLE picks the view whose leave-one-out 1NN accuracy over the training
/// indices is highest (test labels never consulted); CLE embeds the
/// row-concatenation of all views.
BaselineEmbeddings baseline_embeddings(const MultiViewDataset& dataset, int d,
                                       const MvLpeConfig& config, const SplitPlan& split,
                                       BaselineEngine engine = BaselineEngine::lpe);

/// Repeated-random-split protocol: embeddings are transductive (fit on all
/// N samples; labels of test samples never consulted), repeat r splits
/// with seed base_seed + r.
ExperimentReport run_experiment(const MultiViewDataset& dataset, Method method,
                                const MvLpeConfig& config, int repeats, double fraction,
                                std::uint64_t base_seed,
                                BaselineEngine engine = BaselineEngine::lpe);

/// CSV rows `method,dims,repeat,seed,accuracy` (4 decimal places).
std::string report_to_csv(const ExperimentReport& report);

}  // namespace mvlpe
