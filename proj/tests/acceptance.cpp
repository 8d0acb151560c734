// Acceptance harness: one pass/fail line per criterion, exit 0 only if
// all pass. Every centroid and embedding produced along the way is fed
// through a global constraint sweep reported as the final criterion.

#include <mvlpe/dataio.hpp>
#include <mvlpe/eval.hpp>
#include <mvlpe/kernels.hpp>
#include <mvlpe/lowrank.hpp>
#include <mvlpe/lpe.hpp>
#include <mvlpe/mvlpe.hpp>

#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"

using namespace mvlpe;
namespace fs = std::filesystem;

namespace {

struct ConstraintSweep {
  double worst_orthonormal = 0.0;  // ||UU' - I||_F over direct embeddings/centroids
  double worst_constraint = 0.0;   // carrier-constraint deviation (linear/kernel)
  double worst_feasibility = 0.0;  // low-rank column-sum violation
  int checked = 0;

  void centroid(const Matrix& U) {
    const int d = static_cast<int>(U.rows());
    worst_orthonormal = std::max(
        worst_orthonormal, (U * U.transpose() - Matrix::Identity(d, d)).norm());
    ++checked;
  }
  void embedding(const Embedding& e) {
    if (e.variant == EmbedVariant::direct) {
      centroid(e.U);
    } else {
      ++checked;  // carrier constraints are checked where B is known
    }
  }
  void code(const LowRankCode& c) {
    for (int i = 0; i < c.Z.cols(); ++i)
      worst_feasibility = std::max(worst_feasibility, std::abs(c.Z.col(i).sum() - 1.0));
    ++checked;
  }
  void model(const MvLpeModel& m) {
    centroid(m.u_star);
    for (const auto& e : m.view_embeddings) embedding(e);
  }
};

ConstraintSweep sweep;

MultiViewDataset criterion_dataset(std::uint64_t seed) {
  return synth_multiview(30, 2, {{8, 0.01}, {12, 0.01}, {6, 0.01}}, seed);
}

bool criterion1(std::string& detail) {
  int runs = 0, violations = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MultiViewDataset ds = criterion_dataset(seed);
    for (double p : {0.5, 1.0, 1.5, 2.0})
      for (double gamma : {0.1, 1.0, 10.0}) {
        MvLpeConfig config;
        config.d_star = 3;
        config.p = p;
        config.gamma = gamma;
        MvLpeModel model = fit(ds, config);
        sweep.model(model);
        ++runs;
        const auto& tr = model.objective_trace;
        for (size_t i = 1; i + 1 < tr.size(); ++i) {
          const double rel = (tr[i + 1] - tr[i]) / std::max(1.0, std::abs(tr[i]));
          worst = std::max(worst, rel);
          if (rel > 1e-8) ++violations;
        }
      }
  }
  std::ostringstream ss;
  ss << runs << " fits, " << violations << " trace violations, worst rel increase "
     << worst;
  detail = ss.str();
  return violations == 0;
}

bool criterion2(std::string& detail) {
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Matrix X1 = testutil::seeded_matrix(3, 8, 100 + seed);
    Matrix X2 = testutil::seeded_matrix(3, 8, 200 + seed);
    std::vector<Matrix> Ls = {
        graph_laplacian(similarity_matrix(X1, KernelKind::gaussian)),
        graph_laplacian(similarity_matrix(X2, KernelKind::gaussian))};
    ViewWeights w;
    w.w = Vector(2);
    w.w << 0.3, 0.7;
    Matrix U = update_centroid(Ls, w, 2);
    sweep.centroid(U);
    Matrix Lsum = 0.3 * Ls[0] + 0.7 * Ls[1];
    const double best = (U * Lsum * U.transpose()).trace();
    std::mt19937_64 rng(seed);
    double frame_min = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 100000; ++t) {
      Matrix Q = testutil::random_frame(8, 2, rng);
      frame_min = std::min(frame_min, (Q.transpose() * Lsum * Q).trace());
    }
    if (best > frame_min + 1e-10) {
      detail = "eigen solution lost to a random frame";
      return false;
    }
    worst_margin = std::max(worst_margin, best - frame_min);
  }
  std::ostringstream ss;
  ss << "5 instances x 1e5 frames, worst margin " << worst_margin;
  detail = ss.str();
  return true;
}

bool criterion3(std::string& detail) {
  double worst_rel = 0.0, worst_feas = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Matrix X = testutil::seeded_matrix(3, 12, 300 + seed);
    NeighborIndex nb = knn_neighbors(X, 4);
    LowRankCode code = solve_lowrank_codes(X, nb, 1.0);
    sweep.code(code);
    const double admm_obj = lowrank_objective(X, nb, code.Z, 1.0);
    const double ref_obj = testutil::projected_gradient_objective(X, nb, 1.0, 100000);
    worst_rel = std::max(worst_rel,
                         std::abs(admm_obj - ref_obj) / std::max(1.0, std::abs(ref_obj)));
    for (int i = 0; i < 12; ++i)
      worst_feas = std::max(worst_feas, std::abs(code.Z.col(i).sum() - 1.0));
  }
  std::ostringstream ss;
  ss << "worst objective mismatch " << worst_rel << ", worst column-sum violation "
     << worst_feas;
  detail = ss.str();
  return worst_rel <= 1e-3 && worst_feas <= 1e-6;
}

bool criterion4(std::string& detail) {
  Matrix U = Matrix::Identity(2, 6);
  Matrix L1 = Matrix::Zero(6, 6), L2 = Matrix::Zero(6, 6), L3 = Matrix::Zero(6, 6);
  L1(0, 0) = 1.0;
  L2(0, 0) = L2(1, 1) = 2.0;
  L3(0, 0) = 0.7;
  ViewWeights u2 = update_weights(U, {L1, L2, L3}, 2.0);
  for (int v = 0; v < 3; ++v)
    if (u2.w(v) != 1.0 / 3) {
      detail = "p=2 weights not exactly uniform";
      return false;
    }
  ViewWeights w14 = update_weights(U, {L1, L2}, 1.0);
  if (std::abs(w14.w(0) - 2.0 / 3) > 1e-12 || std::abs(w14.w(1) - 1.0 / 3) > 1e-12) {
    detail = "p=1 traces [1,4] did not yield [2/3, 1/3]";
    return false;
  }
  Matrix X = testutil::seeded_matrix(3, 6, 401);
  Matrix L = graph_laplacian(similarity_matrix(X, KernelKind::gaussian));
  Matrix Ue = smallest_eigenvectors(L, 2).vectors.transpose();
  sweep.centroid(Ue);
  for (double p : {0.5, 1.0, 1.5}) {
    ViewWeights w = update_weights(Ue, {L, L}, p);
    if (std::abs(w.w(0) - 0.5) > 1e-12 || std::abs(w.w(1) - 0.5) > 1e-12) {
      detail = "identical views not uniform at p=" + std::to_string(p);
      return false;
    }
  }
  detail = "exact at p=2, closed-form at p=1, symmetric for p in {0.5,1,1.5}";
  return true;
}

bool criterion5(std::string& detail) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Matrix X = testutil::seeded_matrix(9, 9, 500 + seed);  // square, generically full rank
    NeighborIndex nb = knn_neighbors(X, 4);
    LowRankCode code = solve_lowrank_codes(X, nb, 1.0);
    sweep.code(code);
    ReconstructionMatrix M = assemble_reconstruction_matrix(code, 9);

    Embedding dir = embed_direct(M, 2);
    Embedding ker_id = embed_kernel(Matrix::Identity(9, 9), M, 2, 0.0);
    Embedding lin = embed_linear(X, M, 2, 0.0);
    Embedding ker_lin = embed_kernel(Matrix(X.transpose() * X), M, 2, 0.0);
    sweep.embedding(dir);
    sweep.embedding(ker_id);
    sweep.embedding(lin);
    sweep.embedding(ker_lin);
    worst = std::max(worst, std::abs(ker_id.objective - dir.objective) /
                                std::max(1.0, std::abs(dir.objective)));
    worst = std::max(worst, std::abs(ker_lin.objective - lin.objective) /
                                std::max(1.0, std::abs(lin.objective)));
  }
  std::ostringstream ss;
  ss << "3 fixtures, worst reduction mismatch " << worst;
  detail = ss.str();
  return worst <= 1e-6;
}

bool criterion6(std::string& detail) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    MultiViewDataset ds = testutil::ring_dataset(24, 6, 2, seed);
    MvLpeConfig config;
    config.d_star = 3;
    config.p = 2.0;
    config.gamma = 1e-6;
    MvLpeModel model = fit(ds, config);
    sweep.model(model);
    NeighborIndex nb = knn_neighbors(ds.views[0], config.knn_for(24));
    LowRankCode code = solve_lowrank_codes(ds.views[0], nb, config.lambda, config.admm);
    Embedding dir = embed_direct(assemble_reconstruction_matrix(code, 24), 3);
    sweep.embedding(dir);
    worst = std::max(worst, testutil::principal_angle(model.u_star, dir.U));
  }
  std::ostringstream ss;
  ss << "3 fixtures, worst principal angle " << worst;
  detail = ss.str();
  return worst <= 1e-2;
}

bool criterion7(std::string& detail) {
  MultiViewDataset ds =
      synth_multiview(40, 3, {{8, 0.0}, {8, 1.0}, {8, 1.0}}, 11);
  MvLpeConfig config;
  config.d_star = 3;
  ExperimentReport mv = run_experiment(ds, Method::mvlpe, config, 20, 0.5, 0);
  ExperimentReport ble = run_experiment(ds, Method::ble, config, 20, 0.5, 0);
  ExperimentReport cle = run_experiment(ds, Method::cle, config, 20, 0.5, 0);
  {
    MvLpeModel model = fit(ds, config);
    sweep.model(model);
  }
  std::ostringstream ss;
  ss << "MEAN mvlpe=" << mv.mean_acc << " ble=" << ble.mean_acc << " cle=" << cle.mean_acc;
  detail = ss.str();
  return mv.failed == 0 && ble.failed == 0 && cle.failed == 0 &&
         mv.mean_acc >= ble.mean_acc - 0.02 && mv.mean_acc >= cle.mean_acc - 0.02;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int run_cli(const std::string& args, const fs::path& stdout_to) {
  const std::string cmd =
      std::string(MVLPE_CLI_PATH) + " " + args + " > " + stdout_to.string() + " 2>&1";
  return std::system(cmd.c_str());
}

bool criterion8(std::string& detail) {
  testutil::TempDir dir("acceptance_cli");
  const fs::path root = dir.path();
  {
    std::ofstream spec(root / "spec.json");
    spec << R"({"n_per_class": 20, "n_classes": 2, "seed": 4,
                "views": [{"dim": 8, "noise_sigma": 0.01},
                          {"dim": 6, "noise_sigma": 0.01}]})";
    std::ofstream cfg(root / "config.json");
    cfg << R"({"d_star": 2})";
  }
  const std::string data = (root / "data").string();
  const std::string cfg = (root / "config.json").string();
  if (run_cli("synth --spec " + (root / "spec.json").string() + " --out " + data,
              root / "synth.log") != 0) {
    detail = "synth failed: " + slurp(root / "synth.log");
    return false;
  }
  struct Run {
    const char* model;
    const char* report;
    const char* out;
    const char* threads;
  };
  const std::vector<Run> runs = {{"m1.json", "r1.csv", "o1.txt", "1"},
                                 {"m2.json", "r2.csv", "o2.txt", "8"},
                                 {"m3.json", "r3.csv", "o3.txt", "8"}};
  for (const Run& r : runs) {
    if (run_cli("fit --data " + data + " --config " + cfg + " --out " +
                    (root / r.model).string() + " --threads " + r.threads,
                root / "fit.log") != 0) {
      detail = "fit failed: " + slurp(root / "fit.log");
      return false;
    }
    if (run_cli("eval --data " + data + " --config " + cfg +
                    " --method mvlpe --repeats 5 --fraction 0.5 --out " +
                    (root / r.report).string() + " --threads " + r.threads,
                root / r.out) != 0) {
      detail = "eval failed: " + slurp(root / r.out);
      return false;
    }
  }
  for (int i = 2; i <= 3; ++i) {
    const std::string n = std::to_string(i);
    if (slurp(root / ("m" + n + ".json")) != slurp(root / "m1.json")) {
      detail = "model output differs (run " + n + ")";
      return false;
    }
    if (slurp(root / ("r" + n + ".csv")) != slurp(root / "r1.csv")) {
      detail = "report output differs (run " + n + ")";
      return false;
    }
    if (slurp(root / ("o" + n + ".txt")) != slurp(root / "o1.txt")) {
      detail = "eval stdout differs (run " + n + ")";
      return false;
    }
  }
  MvLpeModel model = load_model(root / "m1.json");
  sweep.model(model);
  detail = "fit and eval byte-identical across reruns and --threads {1,8}";
  return true;
}

bool criterion9(std::string& detail) {
  std::ostringstream ss;
  ss << sweep.checked << " artifacts swept; worst orthonormality deviation "
     << sweep.worst_orthonormal << ", worst feasibility violation "
     << sweep.worst_feasibility;
  detail = ss.str();
  return sweep.checked > 0 && sweep.worst_orthonormal <= 1e-8 &&
         sweep.worst_feasibility <= 1e-6;
}

}  // namespace

int main() {
  set_max_threads(4);
  struct Criterion {
    const char* name;
    bool (*run)(std::string&);
  };
  const std::vector<Criterion> criteria = {
      {"1 monotone convergence over the fixture grid", criterion1},
      {"2 centroid optimality vs random frames", criterion2},
      {"3 low-rank solver fidelity vs reference solver", criterion3},
      {"4 weight formula exactness", criterion4},
      {"5 variant reductions", criterion5},
      {"6 single-view degeneracy", criterion6},
      {"7 end-to-end superiority floor", criterion7},
      {"8 CLI determinism", criterion8},
      {"9 orthonormality/feasibility sweep", criterion9},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s (%.1fs): %s\n", ok ? "PASS" : "FAIL", c.name, secs,
                detail.c_str());
    std::fflush(stdout);
    failures += !ok;
  }
  return failures == 0 ? 0 : 1;
}
