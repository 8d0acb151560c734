// Command-line entry point: fit models, run 1NN experiments, dump
// convergence traces, and synthesize multi-view fixture datasets.

#include <mvlpe/dataio.hpp>
#include <mvlpe/eval.hpp>
#include <mvlpe/mvlpe.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("MVLPE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n < 1) throw mvlpe::ArgumentError("MVLPE_THREADS must be >= 1");
      return n;
    } catch (const mvlpe::ArgumentError&) {
      throw;
    } catch (const std::exception&) {
      throw mvlpe::ArgumentError(std::string("MVLPE_THREADS is not an integer: ") + env);
    }
  }
  return 1;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mvlpe::ArgumentError("cannot open output file: " + path);
  out << text;
  if (!out) throw mvlpe::DataError("failed writing " + path);
}

std::string format_fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

int run_fit(const std::string& data_dir, const std::string& config_path,
            const std::string& out_path) {
  const mvlpe::MultiViewDataset ds = mvlpe::load_dataset(data_dir);
  const mvlpe::MvLpeConfig config = mvlpe::load_config(config_path);
  const mvlpe::MvLpeModel model = mvlpe::fit(ds, config);
  mvlpe::save_model(model, out_path);
  return 0;
}

int run_eval(const std::string& data_dir, const std::string& config_path,
             const std::string& method_name, int repeats, double fraction,
             std::uint64_t seed, const std::string& engine_name,
             const std::string& out_path) {
  if (repeats < 1) throw mvlpe::ArgumentError("--repeats must be >= 1");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw mvlpe::ArgumentError("--fraction must lie in (0, 1)");
  mvlpe::BaselineEngine engine = mvlpe::BaselineEngine::lpe;
  if (engine_name == "le")
    engine = mvlpe::BaselineEngine::le;
  else if (engine_name != "lpe")
    throw mvlpe::ArgumentError("--engine must be lpe or le");

  const mvlpe::MultiViewDataset ds = mvlpe::load_dataset(data_dir);
  const mvlpe::MvLpeConfig config = mvlpe::load_config(config_path);
  const mvlpe::Method method = mvlpe::method_from_string(method_name);
  const mvlpe::ExperimentReport report =
      mvlpe::run_experiment(ds, method, config, repeats, fraction, seed, engine);
  write_text(out_path, mvlpe::report_to_csv(report));
  std::cout << "MEAN=" << format_fixed(report.mean_acc, 4)
            << " MAX=" << format_fixed(report.max_acc, 4) << "\n";
  if (report.failed > 0)
    throw mvlpe::NumericError(std::to_string(report.failed) + " repeat(s) failed");
  return 0;
}

int run_trace(const std::string& model_path, const std::string& out_path) {
  const mvlpe::MvLpeModel model = mvlpe::load_model(model_path);
  const int m = model.disagreement_trace.empty()
                    ? 0
                    : static_cast<int>(model.disagreement_trace[0].size());
  std::string csv = "iter,objective";
  for (int v = 0; v < m; ++v) csv += ",disagreement_v" + std::to_string(v + 1);
  csv += "\n";
  for (size_t i = 0; i < model.objective_trace.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g", i, model.objective_trace[i]);
    csv += buf;
    if (i < model.disagreement_trace.size()) {
      for (double d : model.disagreement_trace[i]) {
        std::snprintf(buf, sizeof(buf), ",%.17g", d);
        csv += buf;
      }
    }
    csv += "\n";
  }
  write_text(out_path, csv);
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) throw mvlpe::ArgumentError("cannot open spec file: " + spec_path);
  json spec;
  try {
    spec = json::parse(in);
  } catch (const json::exception& e) {
    throw mvlpe::DataError(std::string("spec JSON parse error: ") + e.what());
  }
  for (const auto& [key, value] : spec.items()) {
    (void)value;
    if (key != "n_per_class" && key != "n_classes" && key != "views" && key != "seed")
      throw mvlpe::ArgumentError("unknown key in synth spec: " + key);
  }
  if (!spec.contains("n_per_class") || !spec.contains("n_classes") || !spec.contains("views"))
    throw mvlpe::ArgumentError("synth spec needs n_per_class, n_classes, views");
  const int n_per_class = spec["n_per_class"].get<int>();
  const int n_classes = spec["n_classes"].get<int>();
  const std::uint64_t seed = spec.value("seed", std::uint64_t{0});
  std::vector<mvlpe::ViewSpec> views;
  for (const auto& v : spec["views"]) {
    for (const auto& [key, value] : v.items()) {
      (void)value;
      if (key != "dim" && key != "noise_sigma")
        throw mvlpe::ArgumentError("unknown key in view spec: " + key);
    }
    mvlpe::ViewSpec vs;
    vs.dim = v.value("dim", 2);
    vs.noise_sigma = v.value("noise_sigma", 0.0);
    views.push_back(vs);
  }
  const mvlpe::MultiViewDataset ds = mvlpe::synth_multiview(n_per_class, n_classes, views, seed);
  mvlpe::write_dataset(ds, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view low-rank preserving embedding"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (default: MVLPE_THREADS or 1)");

  std::string data_dir, config_path, out_path, model_path, spec_path;
  std::string method_name = "mvlpe", engine_name = "lpe";
  int repeats = 20;
  double fraction = 0.5;
  std::uint64_t seed = 0;

  CLI::App* fit = app.add_subcommand("fit", "Fit a model and write MODEL.json");
  fit->add_option("--data", data_dir, "Dataset directory")->required();
  fit->add_option("--config", config_path, "Config JSON file")->required();
  fit->add_option("--out", out_path, "Output model path")->required();

  CLI::App* eval = app.add_subcommand("eval", "Repeated-split 1NN evaluation");
  eval->add_option("--data", data_dir, "Dataset directory")->required();
  eval->add_option("--config", config_path, "Config JSON file")->required();
  eval->add_option("--method", method_name, "mvlpe, ble, or cle");
  eval->add_option("--repeats", repeats, "Number of random splits");
  eval->add_option("--fraction", fraction, "Training fraction in (0,1)");
  eval->add_option("--seed", seed, "Base split seed (repeat r uses seed+r)");
  eval->add_option("--engine", engine_name, "Baseline engine: lpe or le");
  eval->add_option("--out", out_path, "Output report CSV path")->required();

  CLI::App* trace = app.add_subcommand("trace", "Dump a model's convergence trace CSV");
  trace->add_option("--model", model_path, "Model JSON path")->required();
  trace->add_option("--out", out_path, "Output trace CSV path")->required();

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset directory");
  synth->add_option("--spec", spec_path, "Generator spec JSON file")->required();
  synth->add_option("--out", out_path, "Output dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    mvlpe::set_max_threads(resolve_threads(threads));
    if (fit->parsed()) return run_fit(data_dir, config_path, out_path);
    if (eval->parsed())
      return run_eval(data_dir, config_path, method_name, repeats, fraction, seed, engine_name,
                      out_path);
    if (trace->parsed()) return run_trace(model_path, out_path);
    if (synth->parsed()) return run_synth(spec_path, out_path);
  } catch (const mvlpe::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mvlpe::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mvlpe::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
