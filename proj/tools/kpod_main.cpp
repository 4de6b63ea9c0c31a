// kpod: kernel POD subspace classifier command line.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpod/classifier.hpp"
#include "kpod/data.hpp"
#include "kpod/errors.hpp"
#include "kpod/model_io.hpp"
#include "kpod/search.hpp"

namespace {

using namespace kpod;
using nlohmann::json;

struct KernelFlags {
  std::string kernel = "rbf";
  double sigma = 1.2;
  std::optional<double> gamma;
  int degree = 2;
  double coef0 = 0.0;

  KernelSpec to_spec() const {
    KernelSpec s;
    s.family = family_from_name(kernel);
    s.sigma = gamma ? sigma_from_gamma(*gamma) : sigma;
    s.degree = degree;
    s.coef0 = coef0;
    s.validate();
    return s;
  }
};

struct TrainFlags {
  KernelFlags kernel;
  double energy = 0.999;
  double rank_floor = 1e-10;
  bool centered = false;
  bool balance = false;
  double balance_factor = 2.0;
  std::uint64_t seed = 0;
  std::string scale = "none";

  TrainConfig to_config() const {
    TrainConfig c;
    c.kernel = kernel.to_spec();
    c.policy.energy_threshold = energy;
    c.policy.rank_floor_ratio = rank_floor;
    c.centered = centered;
    c.balance = balance;
    c.balance_factor = balance_factor;
    c.seed = seed;
    c.validate();
    return c;
  }
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& k) {
  cmd->add_option("--kernel", k.kernel, "Kernel family: rbf, linear or poly")
      ->check(CLI::IsMember({"rbf", "linear", "poly", "polynomial"}));
  auto* sig = cmd->add_option("--sigma", k.sigma, "RBF width sigma (default 1.2)")
                  ->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", k.gamma, "LIBSVM-style width: sets sigma = 1/sqrt(2*gamma)")
      ->check(CLI::PositiveNumber)
      ->excludes(sig);
  cmd->add_option("--degree", k.degree, "Polynomial degree")->check(CLI::PositiveNumber);
  cmd->add_option("--coef0", k.coef0, "Polynomial offset");
}

void add_train_flags(CLI::App* cmd, TrainFlags& t) {
  add_kernel_flags(cmd, t.kernel);
  cmd->add_option("--energy", t.energy, "Retained spectral energy fraction (default 0.999)")
      ->check(CLI::Range(1e-12, 1.0));
  cmd->add_option("--rank-floor", t.rank_floor,
                  "Discard eigenvalues below this fraction of the largest (default 1e-10)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--centered", t.centered, "Center the kernel around the class mean");
  cmd->add_flag("--balance", t.balance, "Split oversized classes into reference-sized subsets");
  cmd->add_option("--balance-factor", t.balance_factor,
                  "Split classes at least this multiple of the reference size (default 2)")
      ->check(CLI::Range(2.0, 1e9));
  cmd->add_option("--seed", t.seed, "Seed for seeded operations (fold assignment, subsampling)");
  cmd->add_option("--scale", t.scale, "Feature scaling: none or minmax01")
      ->check(CLI::IsMember({"none", "minmax01"}));
}

std::string describe_subspace(std::size_t i, std::size_t total, const SubspaceModel& s) {
  std::ostringstream os;
  os << "subspace " << (i + 1) << "/" << total << ": label=" << s.class_label
     << " subset=" << s.subset_index << " samples=" << s.sample_count()
     << " modes=" << s.mode_count();
  return os.str();
}

int cmd_train(const std::string& data_path, const std::string& model_path, const TrainFlags& tf) {
  const TrainConfig config = tf.to_config();
  std::vector<Sample> data = load_libsvm_file(data_path);

  ModelFile m;
  m.scaling = fit_scaling(data, scaling_mode_from_name(tf.scale));
  data = apply_scaling(m.scaling, std::move(data));

  const auto t0 = std::chrono::steady_clock::now();
  m.classifier = train(data, config);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (const auto& label : m.classifier.labels)
    std::cout << "class " << label << ": " << m.classifier.class_size(label) << " samples\n";
  std::cout << "subspaces: " << m.classifier.subspaces.size() << "\n";
  for (std::size_t i = 0; i < m.classifier.subspaces.size(); ++i)
    std::cout << describe_subspace(i, m.classifier.subspaces.size(), m.classifier.subspaces[i])
              << "\n";
  std::printf("train_seconds: %.3f\n", secs);

  save_model(model_path, m);
  std::cout << "model_written: " << model_path << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, bool with_distances) {
  const ModelFile m = load_model(model_path);
  std::vector<Sample> data = load_libsvm_file(data_path);
  data = apply_scaling(m.scaling, std::move(data));

  std::vector<SparseVec> queries;
  queries.reserve(data.size());
  for (const auto& s : data) queries.push_back(s.features);
  const std::vector<Prediction> preds = predict_batch(m.classifier, queries);

  std::ofstream out(out_path);
  if (!out) throw input_error("cannot write predictions file '" + out_path + "'");
  if (with_distances) {
    out << "label";
    for (const auto& l : m.classifier.labels) out << ",dist_" << l;
    out << '\n';
    for (const auto& p : preds) {
      out << p.label;
      for (double d : p.class_distances) out << ',' << format_double(d);
      out << '\n';
    }
  } else {
    for (const auto& p : preds) out << p.label << '\n';
  }
  if (!out.good()) throw input_error("write failed for '" + out_path + "'");
  std::cout << "predictions_written: " << out_path << " (" << preds.size() << " rows)\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, bool as_json) {
  const ModelFile m = load_model(model_path);
  std::vector<Sample> data = load_libsvm_file(data_path);
  data = apply_scaling(m.scaling, std::move(data));
  const Metrics met = evaluate(m.classifier, data);

  if (as_json) {
    json doc{{"accuracy", met.accuracy},
             {"labels", met.labels},
             {"recall", met.recall},
             {"confusion", met.confusion}};
    std::cout << doc.dump() << "\n";
    return 0;
  }
  std::printf("accuracy: %.6f\n", met.accuracy);
  std::cout << "confusion matrix (rows=true, cols=predicted; labels";
  for (const auto& l : met.labels) std::cout << " " << l;
  std::cout << "):\n";
  for (std::size_t i = 0; i < met.labels.size(); ++i) {
    std::cout << met.labels[i] << ":";
    for (std::size_t j = 0; j < met.labels.size(); ++j) std::cout << " " << met.confusion[i][j];
    std::cout << "\n";
  }
  for (std::size_t i = 0; i < met.labels.size(); ++i)
    std::printf("recall %s: %.6f\n", met.labels[i].c_str(), met.recall[i]);
  return 0;
}

int cmd_gen2d(const std::string& case_name, int n, double noise, std::uint64_t seed,
              const std::string& out_path) {
  const Gen2dCase c = gen2d_case_from_name(case_name);
  const double resolved_noise = noise < 0.0 ? gen2d_default_noise(c) : noise;
  const std::vector<Sample> data = gen2d(c, n, resolved_noise, seed);
  save_libsvm_file(out_path, data);
  std::cout << "dataset_written: " << out_path << " (" << data.size() << " samples, noise "
            << format_double(resolved_noise) << ")\n";
  return 0;
}

int cmd_grid(const std::string& model_path, const std::string& out_path, double xmin, double xmax,
             double ymin, double ymax, int resolution) {
  const ModelFile m = load_model(model_path);

  std::vector<SparseVec> queries;
  queries.reserve(std::size_t(resolution) * resolution);
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = resolution > 1 ? ymin + (ymax - ymin) * iy / (resolution - 1) : ymin;
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = resolution > 1 ? xmin + (xmax - xmin) * ix / (resolution - 1) : xmin;
      SparseVec q;
      if (x != 0.0) q.emplace_back(1, x);
      if (y != 0.0) q.emplace_back(2, y);
      queries.push_back(apply_scaling(m.scaling, q));
    }
  }
  const std::vector<Prediction> preds = predict_batch(m.classifier, queries);

  std::ofstream out(out_path);
  if (!out) throw input_error("cannot write grid file '" + out_path + "'");
  out << "x,y,predicted_label,min_distance\n";
  std::size_t row = 0;
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = resolution > 1 ? ymin + (ymax - ymin) * iy / (resolution - 1) : ymin;
    for (int ix = 0; ix < resolution; ++ix, ++row) {
      const double x = resolution > 1 ? xmin + (xmax - xmin) * ix / (resolution - 1) : xmin;
      const Prediction& p = preds[row];
      double best = p.class_distances[0];
      for (double d : p.class_distances) best = std::min(best, d);
      out << format_double(x) << ',' << format_double(y) << ',' << p.label << ','
          << format_double(best) << '\n';
    }
  }
  if (!out.good()) throw input_error("write failed for '" + out_path + "'");
  std::cout << "grid_written: " << out_path << " (" << row << " rows)\n";
  return 0;
}

int cmd_search(const std::string& data_path, const TrainFlags& tf, std::string sigmas_arg,
               std::string energies_arg, int span, int folds, int cap, bool as_json) {
  const TrainConfig base = tf.to_config();
  std::vector<Sample> data = load_libsvm_file(data_path);
  const ScalingParams scaling = fit_scaling(data, scaling_mode_from_name(tf.scale));
  data = apply_scaling(scaling, std::move(data));

  auto parse_list = [](const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw input_error("bad numeric list entry '" + item + "'");
      }
    }
    return out;
  };

  SearchSpec spec;
  spec.sigmas = sigmas_arg.empty() ? auto_sigma_grid(data, span, tf.seed) : parse_list(sigmas_arg);
  spec.energies = energies_arg.empty() ? std::vector<double>{} : parse_list(energies_arg);
  spec.folds = folds;
  spec.seed = tf.seed;
  spec.per_class_cap = cap;

  const SearchResult res = grid_search(data, base, spec);

  if (as_json) {
    json pts = json::array();
    for (const auto& p : res.evaluated)
      pts.push_back({{"sigma", p.sigma}, {"energy", p.energy}, {"cv_accuracy", p.cv_accuracy}});
    json doc{{"best",
              {{"sigma", res.best.sigma},
               {"energy", res.best.energy},
               {"cv_accuracy", res.best.cv_accuracy}}},
             {"evaluated", std::move(pts)}};
    std::cout << doc.dump() << "\n";
    return 0;
  }
  for (const auto& p : res.evaluated)
    std::cout << "cv: sigma=" << format_double(p.sigma) << " energy=" << format_double(p.energy)
              << " accuracy=" << format_double(p.cv_accuracy) << "\n";
  std::cout << "best: sigma=" << format_double(res.best.sigma)
            << " energy=" << format_double(res.best.energy)
            << " accuracy=" << format_double(res.best.cv_accuracy) << "\n";
  return 0;
}

int cmd_addclass(const std::string& model_path, const std::string& data_path,
                 std::string label_arg, const std::string& out_path) {
  const ModelFile m = load_model(model_path);
  std::vector<Sample> data = load_libsvm_file(data_path);
  if (data.empty()) throw input_error("add-class: dataset '" + data_path + "' is empty");

  std::string label = data[0].label;
  for (const auto& s : data)
    if (s.label != label)
      throw input_error("add-class: dataset has multiple labels ('" + label + "' and '" + s.label +
                        "'); pass a single-class file");
  if (!label_arg.empty()) label = label_arg;

  data = apply_scaling(m.scaling, std::move(data));
  std::vector<SparseVec> features;
  features.reserve(data.size());
  for (const auto& s : data) features.push_back(s.features);

  ModelFile out{add_class(m.classifier, label, features), m.scaling};
  save_model(out_path, out);

  std::cout << "class_added: " << label << "\n";
  for (std::size_t i = 0; i < out.classifier.subspaces.size(); ++i) {
    const auto& s = out.classifier.subspaces[i];
    if (s.class_label == label)
      std::cout << "computed " << describe_subspace(i, out.classifier.subspaces.size(), s) << "\n";
  }
  std::cout << "reused_subspaces: " << m.classifier.subspaces.size() << "\n";
  std::cout << "model_written: " << out_path << "\n";
  return 0;
}

int cmd_rmclass(const std::string& model_path, const std::string& label,
                const std::string& out_path) {
  const ModelFile m = load_model(model_path);
  ModelFile out{remove_class(m.classifier, label), m.scaling};
  save_model(out_path, out);
  std::cout << "class_removed: " << label << "\n";
  std::cout << "remaining_subspaces: " << out.classifier.subspaces.size() << "\n";
  std::cout << "model_written: " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kpod: minimum-distance-to-subspace kernel classifier"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit per-class subspaces and write a model file");
  std::string train_data, train_model;
  TrainFlags train_flags;
  train_cmd->add_option("--data", train_data, "Training dataset (LIBSVM format)")->required();
  train_cmd->add_option("--model", train_model, "Output model path")->required();
  add_train_flags(train_cmd, train_flags);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict labels for a dataset");
  std::string pr_model, pr_data, pr_out;
  bool pr_dist = false;
  predict_cmd->add_option("--model", pr_model, "Model file")->required();
  predict_cmd->add_option("--data", pr_data, "Dataset to classify")->required();
  predict_cmd->add_option("--out", pr_out, "Output predictions path")->required();
  predict_cmd->add_flag("--distances", pr_dist, "Emit CSV with per-class distances");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a labeled dataset");
  std::string ev_model, ev_data;
  bool ev_json = false;
  eval_cmd->add_option("--model", ev_model, "Model file")->required();
  eval_cmd->add_option("--data", ev_data, "Labeled dataset")->required();
  eval_cmd->add_flag("--json", ev_json, "Machine-readable output");

  // gen2d
  auto* gen_cmd = app.add_subcommand("gen2d", "Generate a synthetic 2D dataset");
  std::string g_case = "connected", g_out;
  int g_n = 200;
  double g_noise = -1.0;
  std::uint64_t g_seed = 0;
  gen_cmd->add_option("--case", g_case, "connected, nonconnected or spiral")
      ->check(CLI::IsMember({"connected", "nonconnected", "spiral"}));
  gen_cmd->add_option("--n", g_n, "Samples per class")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--noise", g_noise, "Noise stddev (default: 0.6 blobs, 0.02 spiral)");
  gen_cmd->add_option("--seed", g_seed, "Generator seed");
  gen_cmd->add_option("--out", g_out, "Output dataset path")->required();

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "Write a decision-map CSV over a 2D grid");
  std::string gr_model, gr_out;
  double gr_xmin = -3, gr_xmax = 3, gr_ymin = -3, gr_ymax = 3;
  int gr_res = 100;
  grid_cmd->add_option("--model", gr_model, "Model file")->required();
  grid_cmd->add_option("--out", gr_out, "Output CSV path")->required();
  grid_cmd->add_option("--xmin", gr_xmin, "Grid x minimum");
  grid_cmd->add_option("--xmax", gr_xmax, "Grid x maximum");
  grid_cmd->add_option("--ymin", gr_ymin, "Grid y minimum");
  grid_cmd->add_option("--ymax", gr_ymax, "Grid y maximum");
  grid_cmd->add_option("--resolution", gr_res, "Points per axis (default 100)")
      ->check(CLI::PositiveNumber);

  // search
  auto* search_cmd =
      app.add_subcommand("search", "Cross-validated grid search over sigma (and energy)");
  std::string se_data, se_sigmas, se_energies;
  int se_span = 3, se_folds = 5, se_cap = 0;
  bool se_json = false;
  TrainFlags search_flags;
  search_cmd->add_option("--data", se_data, "Training dataset")->required();
  search_cmd->add_option("--sigmas", se_sigmas, "Comma-separated sigma candidates");
  search_cmd->add_option("--energies", se_energies, "Comma-separated energy candidates");
  search_cmd->add_option("--grid-span", se_span,
                         "Auto grid: sigma0 * 2^k for k in [-span, span] (default 3)");
  search_cmd->add_option("--folds", se_folds, "Cross-validation folds (default 5)")
      ->check(CLI::Range(2, 1000));
  search_cmd->add_option("--search-cap", se_cap,
                         "Per-class sample cap during CV (0 = use all samples)");
  search_cmd->add_flag("--json", se_json, "Machine-readable output");
  add_train_flags(search_cmd, search_flags);

  // add-class / rm-class
  auto* add_cmd = app.add_subcommand("add-class", "Fit one new class into an existing model");
  std::string ad_model, ad_data, ad_label, ad_out;
  add_cmd->add_option("--model", ad_model, "Input model file")->required();
  add_cmd->add_option("--data", ad_data, "Single-class dataset for the new class")->required();
  add_cmd->add_option("--label", ad_label, "Override label for the new class");
  add_cmd->add_option("--out", ad_out, "Output model path")->required();

  auto* rm_cmd = app.add_subcommand("rm-class", "Drop one class from an existing model");
  std::string rm_model, rm_label, rm_out;
  rm_cmd->add_option("--model", rm_model, "Input model file")->required();
  rm_cmd->add_option("--label", rm_label, "Label to remove")->required();
  rm_cmd->add_option("--out", rm_out, "Output model path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_data, train_model, train_flags);
    if (predict_cmd->parsed()) return cmd_predict(pr_model, pr_data, pr_out, pr_dist);
    if (eval_cmd->parsed()) return cmd_eval(ev_model, ev_data, ev_json);
    if (gen_cmd->parsed()) return cmd_gen2d(g_case, g_n, g_noise, g_seed, g_out);
    if (grid_cmd->parsed())
      return cmd_grid(gr_model, gr_out, gr_xmin, gr_xmax, gr_ymin, gr_ymax, gr_res);
    if (search_cmd->parsed())
      return cmd_search(se_data, search_flags, se_sigmas, se_energies, se_span, se_folds, se_cap,
                        se_json);
    if (add_cmd->parsed()) return cmd_addclass(ad_model, ad_data, ad_label, ad_out);
    if (rm_cmd->parsed()) return cmd_rmclass(rm_model, rm_label, rm_out);
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
