#include "mvlpe/eval.hpp"

#include "mvlpe/kernels.hpp"
#include "mvlpe/lowrank.hpp"
#include "mvlpe/lpe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mvlpe {

Method method_from_string(const std::string& s) {
  if (s == "mvlpe") return Method::mvlpe;
  if (s == "ble") return Method::ble;
  if (s == "cle") return Method::cle;
  throw ArgumentError("unknown method '" + s + "' (expected mvlpe, ble, or cle)");
}

std::string method_to_string(Method m) {
  switch (m) {
    case Method::mvlpe: return "mvlpe";
    case Method::ble: return "ble";
    case Method::cle: return "cle";
  }
  return "mvlpe";
}

std::vector<int> one_nn_classify(const Matrix& embedding, const std::vector<int>& train_indices,
                                 const std::vector<int>& train_labels,
                                 const std::vector<int>& test_indices) {
  if (train_indices.empty()) throw ArgumentError("one_nn_classify: empty training set");
  if (train_indices.size() != train_labels.size())
    throw ArgumentError("one_nn_classify: train indices/labels size mismatch");
  // Ascending train sample index so that exact distance ties resolve low.
  std::vector<int> order(train_indices.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return train_indices[a] < train_indices[b]; });

  std::vector<int> pred(test_indices.size());
  parallel_for(static_cast<int>(test_indices.size()), [&](int t) {
    double best = std::numeric_limits<double>::infinity();
    int label = -1;
    for (int i : order) {
      const double d =
          (embedding.col(train_indices[i]) - embedding.col(test_indices[t])).squaredNorm();
      if (d < best) {
        best = d;
        label = train_labels[i];
      }
    }
    pred[t] = label;
  });
  return pred;
}

namespace {

Embedding single_view_embedding(const Matrix& X, int d, const MvLpeConfig& config,
                                BaselineEngine engine) {
  if (engine == BaselineEngine::le) {
    Matrix L = graph_laplacian(similarity_matrix(X, config.view_kernel, config.view_kernel_params));
    EigenResult eig = smallest_eigenvectors(L, d);
    Embedding e;
    e.variant = EmbedVariant::direct;
    e.U = eig.vectors.transpose();
    e.eigenvalues = eig.values;
    e.objective = eig.values.sum();
    return e;
  }
  NeighborIndex nb = knn_neighbors(X, config.knn_for(static_cast<int>(X.cols())));
  LowRankCode code = solve_lowrank_codes(X, nb, config.lambda, config.admm);
  return embed_direct(assemble_reconstruction_matrix(code, static_cast<int>(X.cols())), d);
}

// Leave-one-out 1NN accuracy over the training indices only.
double loo_train_accuracy(const Matrix& embedding, const std::vector<int>& train,
                          const std::vector<int>& labels) {
  int correct = 0;
  for (size_t i = 0; i < train.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int label = -1;
    for (size_t j = 0; j < train.size(); ++j) {
      if (j == i) continue;
      const double d = (embedding.col(train[j]) - embedding.col(train[i])).squaredNorm();
      if (d < best) {
        best = d;
        label = labels[train[j]];
      }
    }
    correct += (label == labels[train[i]]);
  }
  return static_cast<double>(correct) / train.size();
}

double split_accuracy(const Matrix& embedding, const MultiViewDataset& ds,
                      const SplitPlan& split) {
  std::vector<int> train_labels(split.train_indices.size());
  for (size_t i = 0; i < split.train_indices.size(); ++i)
    train_labels[i] = ds.labels[split.train_indices[i]];
  auto pred = one_nn_classify(embedding, split.train_indices, train_labels, split.test_indices);
  int correct = 0;
  for (size_t t = 0; t < pred.size(); ++t)
    correct += (pred[t] == ds.labels[split.test_indices[t]]);
  return static_cast<double>(correct) / pred.size();
}

}  // namespace

BaselineEmbeddings baseline_embeddings(const MultiViewDataset& dataset, int d,
                                       const MvLpeConfig& config, const SplitPlan& split,
                                       BaselineEngine engine) {
  dataset.validate();
  BaselineEmbeddings out;
  out.per_view.resize(dataset.n_views());
  for (int v = 0; v < dataset.n_views(); ++v)
    out.per_view[v] = single_view_embedding(dataset.views[v], d, config, engine);

  double best_acc = -1.0;
  for (int v = 0; v < dataset.n_views(); ++v) {
    const double acc = loo_train_accuracy(out.per_view[v].U, split.train_indices, dataset.labels);
    if (acc > best_acc) {
      best_acc = acc;
      out.best_view = v;
    }
  }
  out.ble = out.per_view[out.best_view];

  int total_dim = 0;
  for (const auto& X : dataset.views) total_dim += static_cast<int>(X.rows());
  Matrix concat(total_dim, dataset.n_samples());
  int at = 0;
  for (const auto& X : dataset.views) {
    concat.middleRows(at, static_cast<int>(X.rows())) = X;
    at += static_cast<int>(X.rows());
  }
  out.cle = single_view_embedding(concat, d, config, engine);
  return out;
}

ExperimentReport run_experiment(const MultiViewDataset& dataset, Method method,
                                const MvLpeConfig& config, int repeats, double fraction,
                                std::uint64_t base_seed, BaselineEngine engine) {
  if (repeats < 1) throw ArgumentError("run_experiment: repeats must be >= 1");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ArgumentError("run_experiment: fraction must lie in (0, 1)");
  const auto t0 = std::chrono::steady_clock::now();

  ExperimentReport report;
  report.method = method_to_string(method);
  report.dims = config.d_star;
  report.repeats = repeats;

  // The embeddings are transductive and independent of the split, so the
  // model is fitted once and reused across repeats; per-repeat refits
  // would be bit-identical.
  const int n = dataset.n_samples();
  Matrix shared_embedding;  // mvlpe centroid or cle concatenation
  Vector weights;
  std::string fit_error;
  std::vector<Embedding> per_view;  // ble only
  try {
    switch (method) {
      case Method::mvlpe: {
        MvLpeModel model = fit(dataset, config);
        shared_embedding = model.u_star;
        weights = model.weights.w;
        break;
      }
      case Method::ble:
        for (int v = 0; v < dataset.n_views(); ++v)
          per_view.push_back(
              single_view_embedding(dataset.views[v], config.d_star, config, engine));
        break;
      case Method::cle: {
        int total_dim = 0;
        for (const auto& X : dataset.views) total_dim += static_cast<int>(X.rows());
        Matrix concat(total_dim, n);
        int at = 0;
        for (const auto& X : dataset.views) {
          concat.middleRows(at, static_cast<int>(X.rows())) = X;
          at += static_cast<int>(X.rows());
        }
        shared_embedding = single_view_embedding(concat, config.d_star, config, engine).U;
        break;
      }
    }
  } catch (const std::exception& e) {
    fit_error = e.what();
  }

  report.accuracies.assign(repeats, -1.0);  // -1 marks a failed repeat
  for (int r = 0; r < repeats; ++r) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(r);
    report.seeds.push_back(seed);
    if (!fit_error.empty()) {
      ++report.failed;
      continue;
    }
    try {
      SplitPlan split = make_split(n, fraction, seed);
      double acc = 0.0;
      if (method == Method::ble) {
        double best_loo = -1.0;
        int best_view = 0;
        for (int v = 0; v < dataset.n_views(); ++v) {
          const double loo =
              loo_train_accuracy(per_view[v].U, split.train_indices, dataset.labels);
          if (loo > best_loo) {
            best_loo = loo;
            best_view = v;
          }
        }
        acc = split_accuracy(per_view[best_view].U, dataset, split);
      } else {
        acc = split_accuracy(shared_embedding, dataset, split);
      }
      report.accuracies[r] = acc;
    } catch (const std::exception&) {
      ++report.failed;
    }
  }

  double sum = 0.0, mx = 0.0;
  int done = 0;
  for (double a : report.accuracies) {
    if (a < 0) continue;
    sum += a;
    mx = std::max(mx, a);
    ++done;
  }
  if (done > 0) {
    report.mean_acc = sum / done;
    report.max_acc = mx;
  }
  if (method == Method::mvlpe && weights.size() > 0) report.per_view_weights_summary = weights;
  report.wallclock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "method,dims,repeat,seed,accuracy\n";
  for (size_t r = 0; r < report.seeds.size(); ++r) {
    out << report.method << ',' << report.dims << ',' << r << ',' << report.seeds[r] << ',';
    if (r < report.accuracies.size() && report.accuracies[r] >= 0.0) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.4f", report.accuracies[r]);
      out << buf;
    } else {
      out << "failed";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mvlpe
