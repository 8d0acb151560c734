#include "mvlpe/mvlpe.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mvlpe {

using nlohmann::json;

int MvLpeConfig::knn_for(int n_samples) const {
  if (knn > 0) return knn;
  return std::min(10, n_samples - 1);
}

int MvLpeConfig::d_view_for(int view) const {
  if (d_view.empty()) return d_star;
  return d_view.at(view);
}

void MvLpeConfig::validate() const {
  if (!(p > 0.0 && p <= 2.0)) throw ArgumentError("config: p must lie in (0, 2]");
  if (!(gamma > 0.0)) throw ArgumentError("config: gamma must be positive");
  if (d_star < 1) throw ArgumentError("config: d_star must be >= 1");
  for (int d : d_view)
    if (d < 1) throw ArgumentError("config: every d_view entry must be >= 1");
  if (!(lambda > 0.0)) throw ArgumentError("config: lambda must be positive");
  if (max_outer_iters < 1) throw ArgumentError("config: max_outer_iters must be >= 1");
  if (!(outer_tol > 0.0)) throw ArgumentError("config: outer_tol must be positive");
  if (admm.mu <= 0 || admm.tol <= 0 || admm.max_iters < 1)
    throw ArgumentError("config: invalid admm options");
}

Matrix update_centroid(const std::vector<Matrix>& laplacians, const ViewWeights& weights,
                       int d_star) {
  if (laplacians.empty() || weights.w.size() != static_cast<int>(laplacians.size()))
    throw ArgumentError("update_centroid: weights/laplacians size mismatch");
  Matrix L_star = weights.w[0] * laplacians[0];
  for (size_t v = 1; v < laplacians.size(); ++v) L_star += weights.w[v] * laplacians[v];
  return smallest_eigenvectors(L_star, d_star).vectors.transpose();
}

Embedding update_view_embedding(const ReconstructionMatrix& M, const Matrix& L_star,
                                double w_v, double gamma, int d_v) {
  if (!(w_v > 0)) throw ArgumentError("update_view_embedding: view weight must be positive");
  const int n = static_cast<int>(M.M.rows());
  Matrix ImM = Matrix::Identity(n, n) - M.M;
  Matrix A = ImM.transpose() * ImM + (gamma * w_v) * L_star;
  EigenResult eig = smallest_eigenvectors(A, d_v);
  Embedding e;
  e.variant = EmbedVariant::direct;
  e.U = eig.vectors.transpose();
  e.eigenvalues = eig.values;
  e.objective = eig.values.sum();
  return e;
}

namespace {

double centroid_trace(const Matrix& u_star, const Matrix& L) {
  return (u_star * L * u_star.transpose()).trace();
}

void check_orthonormal_rows(const Matrix& U, const std::string& what) {
  const int d = static_cast<int>(U.rows());
  const double dev = (U * U.transpose() - Matrix::Identity(d, d)).norm();
  if (!(dev <= 1e-8 * std::sqrt(static_cast<double>(d)) + 1e-8))
    throw ArgumentError(what + ": rows are not orthonormal (deviation " + std::to_string(dev) +
                        ")");
}

constexpr double kTraceClamp = 1e-12;

}  // namespace

ViewWeights update_weights(const Matrix& u_star, const std::vector<Matrix>& laplacians,
                           double p) {
  if (!(p > 0.0 && p <= 2.0)) throw ArgumentError("update_weights: p must lie in (0, 2]");
  const int m = static_cast<int>(laplacians.size());
  ViewWeights out;
  out.w.resize(m);
  int clamped = 0;
  for (int v = 0; v < m; ++v) {
    double t = centroid_trace(u_star, laplacians[v]);
    if (t < kTraceClamp) {
      t = kTraceClamp;
      ++clamped;
    }
    out.w[v] = std::pow(t, p / 2.0 - 1.0);
  }
  out.all_clamped = (clamped == m);
  if (out.all_clamped) out.w.setConstant(1.0);
  out.w /= out.w.sum();
  return out;
}

double joint_objective(const Matrix& u_star, const std::vector<Embedding>& psis,
                       const std::vector<Matrix>& structure_matrices,
                       const std::vector<Matrix>& view_laplacians, const ViewWeights& weights,
                       double gamma) {
  const int m = static_cast<int>(psis.size());
  if (static_cast<int>(structure_matrices.size()) != m ||
      static_cast<int>(view_laplacians.size()) != m || weights.w.size() != m)
    throw ArgumentError("joint_objective: component count mismatch");
  check_orthonormal_rows(u_star, "joint_objective: centroid");
  double agree = 0.0, lpe = 0.0;
  for (int v = 0; v < m; ++v) {
    if (psis[v].U.cols() != u_star.cols())
      throw ArgumentError("joint_objective: embedding sample-count mismatch");
    if (psis[v].variant == EmbedVariant::direct)
      check_orthonormal_rows(psis[v].U, "joint_objective: view embedding");
    agree += weights.w[v] * centroid_trace(u_star, view_laplacians[v]);
    lpe += (psis[v].U * structure_matrices[v] * psis[v].U.transpose()).trace();
  }
  return gamma * agree + lpe;
}

MvLpeModel fit(const MultiViewDataset& dataset, const MvLpeConfig& config) {
  config.validate();
  dataset.validate();
  const int m = dataset.n_views();
  const int n = dataset.n_samples();
  const int k = config.knn_for(n);
  if (n < k + 1) throw ArgumentError("fit: need N >= K+1 samples");
  if (!config.d_view.empty() && static_cast<int>(config.d_view.size()) != m)
    throw ArgumentError("fit: d_view length must match the number of views");

  MvLpeModel model;
  model.config = config;

  // Initialization: low-rank structure and similarity Laplacian per view.
  std::vector<ReconstructionMatrix> recon(m);
  std::vector<Matrix> structure(m), laplacians(m);
  std::vector<Embedding> psis(m);
  std::vector<std::string> init_errors(m);
  parallel_for(m, [&](int v) {
    try {
      const Matrix& X = dataset.views[v];
      NeighborIndex nb = knn_neighbors(X, k);
      LowRankCode code = solve_lowrank_codes(X, nb, config.lambda, config.admm);
      recon[v] = assemble_reconstruction_matrix(code, n);
      Matrix ImM = Matrix::Identity(n, n) - recon[v].M;
      structure[v] = ImM.transpose() * ImM;
      laplacians[v] =
          graph_laplacian(similarity_matrix(X, config.view_kernel, config.view_kernel_params));
      const int dv = config.d_view_for(v);
      switch (config.variant) {
        case EmbedVariant::direct:
          psis[v] = embed_direct(recon[v], dv);
          break;
        case EmbedVariant::linear:
          psis[v] = embed_linear(X, recon[v], dv);
          break;
        case EmbedVariant::kernel:
          psis[v] = embed_kernel(
              similarity_matrix(X, config.view_kernel, config.view_kernel_params).values,
              recon[v], dv);
          break;
      }
    } catch (const std::exception& e) {
      init_errors[v] = e.what();
    }
  });
  for (int v = 0; v < m; ++v)
    if (!init_errors[v].empty())
      throw NumericError("fit: initialization failed for view " + std::to_string(v) + ": " +
                         init_errors[v]);

  ViewWeights weights;
  weights.w = Vector::Constant(m, 1.0 / m);

  Matrix u_star;
  double prev_obj = 0.0;
  for (int it = 0; it < config.max_outer_iters; ++it) {
    Matrix u_cand = update_centroid(laplacians, weights, config.d_star);
    Matrix L_star = graph_laplacian(
        similarity_matrix(u_cand, config.centroid_kernel, config.centroid_kernel_params));

    std::vector<Embedding> psi_cand(m);
    parallel_for(m, [&](int v) {
      psi_cand[v] =
          update_view_embedding(recon[v], L_star, weights.w[v], config.gamma,
                                config.d_view_for(v));
    });

    std::vector<double> dis(m);
    for (int v = 0; v < m; ++v) dis[v] = centroid_trace(u_cand, laplacians[v]);
    ViewWeights w_cand = update_weights(u_cand, laplacians, config.p);
    const double obj =
        joint_objective(u_cand, psi_cand, structure, laplacians, w_cand, config.gamma);

    if (it > 0) {
      const double scale = std::max(1.0, std::abs(prev_obj));
      const double delta = prev_obj - obj;  // positive = improvement
      if (it > 1 && delta < -1e-3 * scale) {
        // Gross increase after the alternation has started descending:
        // diverging, not settling. (The very first comparison is exempt:
        // replacing the uniform initial weights re-weights the agreement
        // term and may move the objective either way.)
        std::ostringstream ss;
        ss << "fit: objective increased beyond tolerance; trace:";
        for (double x : model.objective_trace) ss << ' ' << x;
        ss << ' ' << obj;
        throw NumericError(ss.str());
      }
      if (delta < config.outer_tol * scale) {
        // The objective has stopped decreasing meaningfully: converged.
        // The candidate iterate is kept (its weights reflect the final
        // re-weighting); its objective is recorded only when it did not
        // tick upward, so the trace ends at the floor value.
        model.converged = true;
        u_star = std::move(u_cand);
        psis = std::move(psi_cand);
        weights = std::move(w_cand);
        model.iters = it + 1;
        if (delta >= 0) {
          model.objective_trace.push_back(obj);
          model.disagreement_trace.push_back(dis);
        }
        break;
      }
    }
    u_star = std::move(u_cand);
    psis = std::move(psi_cand);
    weights = std::move(w_cand);
    model.objective_trace.push_back(obj);
    model.disagreement_trace.push_back(dis);
    model.iters = it + 1;
    prev_obj = obj;
  }

  model.u_star = std::move(u_star);
  model.view_embeddings = std::move(psis);
  model.weights = std::move(weights);
  return model;
}

// ---------------------------------------------------------------- JSON

namespace {

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(i).size()) != cols)
      throw DataError("model JSON: ragged matrix rows");
    for (int c = 0; c < cols; ++c) M(i, c) = j.at(i).at(c).get<double>();
  }
  return M;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ArgumentError("config: unknown key '" + key + "' in " + where);
  }
}

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "gaussian") return KernelKind::gaussian;
  if (s == "linear") return KernelKind::linear;
  if (s == "polynomial") return KernelKind::polynomial;
  throw ArgumentError("config: unknown kernel kind '" + s + "'");
}

std::string kernel_kind_to_string(KernelKind k) {
  switch (k) {
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
  }
  return "gaussian";
}

void parse_kernel(const json& j, const std::string& where, KernelKind* kind,
                  KernelParams* params) {
  reject_unknown_keys(j, {"kind", "sigma", "degree", "offset"}, where);
  if (j.contains("kind")) *kind = kernel_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("sigma")) {
    if (j.at("sigma").is_string()) {
      if (j.at("sigma").get<std::string>() != "auto")
        throw ArgumentError("config: sigma must be a positive number or \"auto\"");
      params->sigma = kAutoSigma;
    } else {
      params->sigma = j.at("sigma").get<double>();
      if (params->sigma <= 0)
        throw ArgumentError("config: explicit sigma must be positive");
    }
  }
  if (j.contains("degree")) params->degree = j.at("degree").get<double>();
  if (j.contains("offset")) params->offset = j.at("offset").get<double>();
}

json kernel_to_json(KernelKind kind, const KernelParams& params) {
  json j;
  j["kind"] = kernel_kind_to_string(kind);
  if (params.sigma == kAutoSigma)
    j["sigma"] = "auto";
  else
    j["sigma"] = params.sigma;
  if (kind == KernelKind::polynomial) {
    j["degree"] = params.degree;
    j["offset"] = params.offset;
  }
  return j;
}

EmbedVariant variant_from_string(const std::string& s) {
  if (s == "direct") return EmbedVariant::direct;
  if (s == "linear") return EmbedVariant::linear;
  if (s == "kernel") return EmbedVariant::kernel;
  throw ArgumentError("config: unknown variant '" + s + "'");
}

std::string variant_to_string(EmbedVariant v) {
  switch (v) {
    case EmbedVariant::direct: return "direct";
    case EmbedVariant::linear: return "linear";
    case EmbedVariant::kernel: return "kernel";
  }
  return "direct";
}

MvLpeConfig config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"d_star", "d_view", "gamma", "p", "variant", "kernel", "centroid_kernel",
                       "knn", "lambda", "admm", "max_outer_iters", "outer_tol", "seed"},
                      "config");
  MvLpeConfig c;
  if (j.contains("d_view")) c.d_view = j.at("d_view").get<std::vector<int>>();
  if (j.contains("d_star"))
    c.d_star = j.at("d_star").get<int>();
  else if (!c.d_view.empty())
    c.d_star = *std::max_element(c.d_view.begin(), c.d_view.end());
  if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
  if (j.contains("p")) c.p = j.at("p").get<double>();
  if (j.contains("variant")) c.variant = variant_from_string(j.at("variant").get<std::string>());
  if (j.contains("kernel"))
    parse_kernel(j.at("kernel"), "kernel", &c.view_kernel, &c.view_kernel_params);
  if (j.contains("centroid_kernel"))
    parse_kernel(j.at("centroid_kernel"), "centroid_kernel", &c.centroid_kernel,
                 &c.centroid_kernel_params);
  if (j.contains("knn")) c.knn = j.at("knn").get<int>();
  if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
  if (j.contains("admm")) {
    const json& a = j.at("admm");
    reject_unknown_keys(a, {"mu", "tol", "max_iters"}, "admm");
    if (a.contains("mu")) c.admm.mu = a.at("mu").get<double>();
    if (a.contains("tol")) c.admm.tol = a.at("tol").get<double>();
    if (a.contains("max_iters")) c.admm.max_iters = a.at("max_iters").get<int>();
  }
  if (j.contains("max_outer_iters")) c.max_outer_iters = j.at("max_outer_iters").get<int>();
  if (j.contains("outer_tol")) c.outer_tol = j.at("outer_tol").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  c.validate();
  return c;
}

json config_to_json(const MvLpeConfig& c) {
  json j;
  j["d_star"] = c.d_star;
  if (!c.d_view.empty()) j["d_view"] = c.d_view;
  j["gamma"] = c.gamma;
  j["p"] = c.p;
  j["variant"] = variant_to_string(c.variant);
  j["kernel"] = kernel_to_json(c.view_kernel, c.view_kernel_params);
  j["centroid_kernel"] = kernel_to_json(c.centroid_kernel, c.centroid_kernel_params);
  j["knn"] = c.knn;
  j["lambda"] = c.lambda;
  j["admm"] = {{"mu", c.admm.mu}, {"tol", c.admm.tol}, {"max_iters", c.admm.max_iters}};
  j["max_outer_iters"] = c.max_outer_iters;
  j["outer_tol"] = c.outer_tol;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

MvLpeConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
}

std::string config_to_json_text(const MvLpeConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

MvLpeConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

void save_model(const MvLpeModel& model, const std::filesystem::path& path) {
  json j;
  j["config"] = config_to_json(model.config);
  j["weights"] = std::vector<double>(model.weights.w.data(),
                                     model.weights.w.data() + model.weights.w.size());
  j["u_star"] = matrix_to_json(model.u_star);
  j["view_embeddings"] = json::array();
  for (const auto& e : model.view_embeddings) j["view_embeddings"].push_back(matrix_to_json(e.U));
  j["objective_trace"] = model.objective_trace;
  j["disagreement_trace"] = model.disagreement_trace;
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write model file: " + path.string());
  out << j.dump(2) << '\n';
}

MvLpeModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
    MvLpeModel model;
    model.config = config_from_json(j.at("config"));
    auto w = j.at("weights").get<std::vector<double>>();
    model.weights.w = Eigen::Map<Vector>(w.data(), static_cast<int>(w.size()));
    model.u_star = matrix_from_json(j.at("u_star"));
    for (const auto& e : j.at("view_embeddings")) {
      Embedding emb;
      emb.U = matrix_from_json(e);
      model.view_embeddings.push_back(std::move(emb));
    }
    model.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    model.disagreement_trace =
        j.at("disagreement_trace").get<std::vector<std::vector<double>>>();
    model.iters = static_cast<int>(model.objective_trace.size());
    return model;
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path.string() + ": " + e.what());
  }
}

}  // namespace mvlpe
