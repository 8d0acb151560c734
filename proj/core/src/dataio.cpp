#include "mvlpe/dataio.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace mvlpe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("missing or unreadable file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

double parse_value(const std::string& tok, const fs::path& file, int row, int col) {
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw DataError("bad numeric value '" + tok + "' in " + file.string() + " at row " +
                    std::to_string(row) + ", col " + std::to_string(col));
  }
}

// CSV of N rows x D cols, transposed into a D x N matrix.
Matrix read_view_csv(const fs::path& file, int n_samples, int dim, const std::string& view) {
  auto lines = split_lines(read_text(file));
  if (static_cast<int>(lines.size()) != n_samples)
    throw DataError("view '" + view + "': expected " + std::to_string(n_samples) +
                    " rows in " + file.string() + ", got " + std::to_string(lines.size()));
  Matrix X(dim, n_samples);
  for (int r = 0; r < n_samples; ++r) {
    std::istringstream ss(lines[r]);
    std::string tok;
    int c = 0;
    while (std::getline(ss, tok, ',')) {
      if (c >= dim)
        throw DataError("view '" + view + "': row " + std::to_string(r) + " in " +
                        file.string() + " has more than " + std::to_string(dim) + " columns");
      double v = parse_value(tok, file, r, c);
      if (!std::isfinite(v))
        throw DataError("non-finite value in view '" + view + "' at row " +
                        std::to_string(r) + ", col " + std::to_string(c));
      X(c, r) = v;
      ++c;
    }
    if (c != dim)
      throw DataError("view '" + view + "': row " + std::to_string(r) + " in " +
                      file.string() + " has " + std::to_string(c) + " columns, expected " +
                      std::to_string(dim));
  }
  return X;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int MultiViewDataset::n_classes() const {
  int c = 0;
  for (int l : labels) c = std::max(c, l + 1);
  return c;
}

void MultiViewDataset::validate() const {
  if (views.empty()) throw DataError("dataset has no views");
  const int n = n_samples();
  for (int v = 0; v < n_views(); ++v) {
    const Matrix& X = views[v];
    if (X.rows() < 1) throw DataError("view " + std::to_string(v) + " has zero dimensions");
    if (static_cast<int>(X.cols()) != n)
      throw DataError("view " + std::to_string(v) + " has " + std::to_string(X.cols()) +
                      " samples, expected " + std::to_string(n));
    for (int j = 0; j < X.cols(); ++j)
      for (int i = 0; i < X.rows(); ++i)
        if (!std::isfinite(X(i, j)))
          throw DataError("non-finite value in view " + std::to_string(v) + " at row " +
                          std::to_string(i) + ", col " + std::to_string(j));
  }
  if (static_cast<int>(labels.size()) != n)
    throw DataError("labels length " + std::to_string(labels.size()) +
                    " does not match sample count " + std::to_string(n));
  const int c = n_classes();
  std::vector<int> counts(c, 0);
  for (int l : labels) {
    if (l < 0 || l >= c) throw DataError("label out of range: " + std::to_string(l));
    ++counts[l];
  }
  for (int k = 0; k < c; ++k)
    if (counts[k] == 0) throw DataError("class " + std::to_string(k) + " has no samples");
}

MultiViewDataset load_dataset(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.json";
  json meta;
  try {
    meta = json::parse(read_text(meta_path));
  } catch (const json::exception& e) {
    throw DataError("cannot parse " + meta_path.string() + ": " + e.what());
  }
  MultiViewDataset ds;
  int n_samples = 0;
  try {
    n_samples = meta.at("n_samples").get<int>();
    const fs::path labels_path = dir / meta.at("labels").get<std::string>();
    auto lines = split_lines(read_text(labels_path));
    if (static_cast<int>(lines.size()) != n_samples)
      throw DataError("expected " + std::to_string(n_samples) + " labels in " +
                      labels_path.string() + ", got " + std::to_string(lines.size()));
    // Dense re-index in sorted order of the original integer labels.
    std::vector<long> raw(n_samples);
    for (int i = 0; i < n_samples; ++i) {
      try {
        size_t pos = 0;
        raw[i] = std::stol(lines[i], &pos);
        if (pos != lines[i].size()) throw std::invalid_argument(lines[i]);
      } catch (const std::exception&) {
        throw DataError("bad label '" + lines[i] + "' at line " + std::to_string(i + 1) +
                        " in " + labels_path.string());
      }
    }
    std::map<long, int> dense;
    for (long r : raw) dense.emplace(r, 0);
    int next = 0;
    for (auto& [orig, id] : dense) {
      id = next++;
      ds.label_names.push_back(std::to_string(orig));
    }
    ds.labels.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) ds.labels[i] = dense[raw[i]];

    for (const auto& view : meta.at("views")) {
      const std::string name = view.at("name").get<std::string>();
      const std::string file = view.at("file").get<std::string>();
      const int dim = view.at("dim").get<int>();
      ds.view_names.push_back(name);
      ds.views.push_back(read_view_csv(dir / file, n_samples, dim, name));
    }
  } catch (const json::exception& e) {
    throw DataError("malformed meta.json in " + dir.string() + ": " + e.what());
  }
  ds.validate();
  return ds;
}

void write_dataset(const MultiViewDataset& ds, const fs::path& dir) {
  ds.validate();
  fs::create_directories(dir);
  json meta;
  meta["n_samples"] = ds.n_samples();
  meta["labels"] = "labels.csv";
  meta["views"] = json::array();
  for (int v = 0; v < ds.n_views(); ++v) {
    const std::string name =
        v < static_cast<int>(ds.view_names.size()) ? ds.view_names[v] : "view" + std::to_string(v);
    const std::string file = name + ".csv";
    meta["views"].push_back({{"name", name}, {"file", file}, {"dim", ds.views[v].rows()}});
    std::ofstream out(dir / file);
    const Matrix& X = ds.views[v];
    for (int j = 0; j < X.cols(); ++j) {
      for (int i = 0; i < X.rows(); ++i) {
        if (i) out << ',';
        out << format_value(X(i, j));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "labels.csv");
    for (int l : ds.labels) {
      if (l < static_cast<int>(ds.label_names.size()))
        out << ds.label_names[l] << '\n';
      else
        out << l << '\n';
    }
  }
  std::ofstream out(dir / "meta.json");
  out << meta.dump(2) << '\n';
}

SplitPlan make_split(int n, double fraction, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("make_split requires n >= 2");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ArgumentError("split fraction must lie in (0, 1), got " + std::to_string(fraction));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  const int n_train = static_cast<int>(std::llround(fraction * n));
  SplitPlan plan;
  plan.seed = seed;
  plan.fraction = fraction;
  plan.train_indices.assign(order.begin(), order.begin() + n_train);
  plan.test_indices.assign(order.begin() + n_train, order.end());
  std::sort(plan.train_indices.begin(), plan.train_indices.end());
  std::sort(plan.test_indices.begin(), plan.test_indices.end());
  return plan;
}

MultiViewDataset synth_multiview(int n_per_class, int n_classes,
                                 const std::vector<ViewSpec>& view_specs, std::uint64_t seed) {
  if (n_classes < 2) throw ArgumentError("synth_multiview requires n_classes >= 2");
  if (n_per_class < 1) throw ArgumentError("synth_multiview requires n_per_class >= 1");
  for (const auto& vs : view_specs) {
    if (vs.dim < 2) throw ArgumentError("synth view dim must be >= 2");
    if (vs.noise_sigma < 0) throw ArgumentError("synth noise_sigma must be >= 0");
  }
  constexpr double kCentroidScale = 4.0;
  constexpr double kLatentSpread = 0.2;
  const int q = std::max(2, n_classes);
  const int n = n_per_class * n_classes;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix centroids(q, n_classes);
  for (int j = 0; j < n_classes; ++j)
    for (int i = 0; i < q; ++i) centroids(i, j) = gauss(rng) * kCentroidScale;

  MultiViewDataset ds;
  ds.labels.resize(n);
  Matrix latent(q, n);
  for (int s = 0; s < n; ++s) {
    const int c = s / n_per_class;
    ds.labels[s] = c;
    for (int i = 0; i < q; ++i) latent(i, s) = centroids(i, c) + gauss(rng) * kLatentSpread;
  }
  for (size_t v = 0; v < view_specs.size(); ++v) {
    const auto& vs = view_specs[v];
    Matrix A(vs.dim, q);
    for (int j = 0; j < q; ++j)
      for (int i = 0; i < vs.dim; ++i) A(i, j) = gauss(rng) / std::sqrt(static_cast<double>(q));
    Matrix X = A * latent;
    if (vs.noise_sigma > 0)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < vs.dim; ++i) X(i, j) += gauss(rng) * vs.noise_sigma;
    ds.views.push_back(std::move(X));
    ds.view_names.push_back("view" + std::to_string(v));
  }
  for (int c = 0; c < n_classes; ++c) ds.label_names.push_back(std::to_string(c));
  ds.validate();
  return ds;
}

}  // namespace mvlpe
