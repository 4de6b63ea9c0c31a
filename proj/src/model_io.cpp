#include "kpod/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kpod/errors.hpp"

namespace kpod {

using nlohmann::json;

namespace {

json kernel_to_json(const KernelSpec& k) {
  return json{{"family", family_name(k.family)},
              {"sigma", k.sigma},
              {"degree", k.degree},
              {"coef0", k.coef0}};
}

KernelSpec kernel_from_json(const json& j) {
  KernelSpec k;
  k.family = family_from_name(j.at("family").get<std::string>());
  k.sigma = j.at("sigma").get<double>();
  k.degree = j.at("degree").get<int>();
  k.coef0 = j.at("coef0").get<double>();
  k.validate();
  return k;
}

json subspace_to_json(const SubspaceModel& s) {
  json samples = json::array();
  for (const auto& vec : s.samples) {
    json sv = json::array();
    for (const auto& [idx, val] : vec) sv.push_back(json::array({idx, val}));
    samples.push_back(std::move(sv));
  }
  json coeffs = json::array();
  for (int i = 0; i < s.coeffs.rows; ++i) {
    json row = json::array();
    for (int k = 0; k < s.coeffs.cols; ++k) row.push_back(s.coeffs(i, k));
    coeffs.push_back(std::move(row));
  }
  json out{{"label", s.class_label},
           {"subset_index", s.subset_index},
           {"eigenvalues", s.eigenvalues},
           {"coeffs", std::move(coeffs)},
           {"samples", std::move(samples)},
           {"centered", s.centered}};
  if (s.centered)
    out["stats"] = json{{"row_means", s.stats.row_means}, {"total_mean", s.stats.total_mean}};
  return out;
}

SubspaceModel subspace_from_json(const json& j) {
  SubspaceModel s;
  s.class_label = j.at("label").get<std::string>();
  s.subset_index = j.at("subset_index").get<int>();
  s.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  s.centered = j.at("centered").get<bool>();

  const json& coeffs = j.at("coeffs");
  const int p = int(coeffs.size());
  const int n = p > 0 ? int(coeffs.at(0).size()) : 0;
  s.coeffs = Matrix(p, n);
  for (int i = 0; i < p; ++i) {
    const json& row = coeffs.at(i);
    if (int(row.size()) != n) throw input_error("model: ragged coefficient matrix");
    for (int k = 0; k < n; ++k) s.coeffs(i, k) = row.at(k).get<double>();
  }

  for (const json& sv : j.at("samples")) {
    SparseVec vec;
    for (const json& pair : sv)
      vec.emplace_back(pair.at(0).get<std::int32_t>(), pair.at(1).get<double>());
    s.samples.push_back(std::move(vec));
  }
  if (int(s.samples.size()) != n) throw input_error("model: sample/coefficient size mismatch");

  if (s.centered) {
    const json& st = j.at("stats");
    s.stats.row_means = st.at("row_means").get<std::vector<double>>();
    s.stats.total_mean = st.at("total_mean").get<double>();
    if (int(s.stats.row_means.size()) != n)
      throw input_error("model: centering stats size mismatch");
  }
  return s;
}

json scaling_to_json(const ScalingParams& p) {
  json out{{"mode", scaling_mode_name(p.mode)}};
  if (p.mode != ScalingMode::none) {
    json feats = json::array();
    for (const auto& [idx, range] : p.features)
      feats.push_back(json::array({idx, range.min, range.max}));
    out["features"] = std::move(feats);
  }
  return out;
}

ScalingParams scaling_from_json(const json& j) {
  ScalingParams p;
  p.mode = scaling_mode_from_name(j.at("mode").get<std::string>());
  if (p.mode != ScalingMode::none) {
    for (const json& f : j.at("features")) {
      FeatureRange r{f.at(1).get<double>(), f.at(2).get<double>()};
      if (r.max < r.min) throw input_error("model: scaling range with max < min");
      p.features.emplace(f.at(0).get<std::int32_t>(), r);
    }
  }
  return p;
}

}  // namespace

std::string model_to_json(const ModelFile& m) {
  json subspaces = json::array();
  for (const auto& s : m.classifier.subspaces) subspaces.push_back(subspace_to_json(s));

  const TrainConfig& cfg = m.classifier.config;
  json doc{{"format", "kpod-model"},
           {"format_version", kModelFormatVersion},
           {"config",
            json{{"kernel", kernel_to_json(cfg.kernel)},
                 {"truncation",
                  json{{"energy_threshold", cfg.policy.energy_threshold},
                       {"rank_floor_ratio", cfg.policy.rank_floor_ratio}}},
                 {"centered", cfg.centered},
                 {"balance", cfg.balance},
                 {"balance_factor", cfg.balance_factor},
                 {"seed", cfg.seed}}},
           {"scaling", scaling_to_json(m.scaling)},
           {"labels", m.classifier.labels},
           {"subspaces", std::move(subspaces)}};
  return doc.dump(1);
}

ModelFile model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw input_error(std::string("model: invalid JSON: ") + e.what());
  }

  try {
    if (doc.at("format").get<std::string>() != "kpod-model")
      throw input_error("model: not a kpod model file");
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw input_error("model: format version " + std::to_string(version) +
                        " does not match supported version " +
                        std::to_string(kModelFormatVersion));

    ModelFile m;
    const json& cfg = doc.at("config");
    m.classifier.config.kernel = kernel_from_json(cfg.at("kernel"));
    m.classifier.config.policy.energy_threshold =
        cfg.at("truncation").at("energy_threshold").get<double>();
    m.classifier.config.policy.rank_floor_ratio =
        cfg.at("truncation").at("rank_floor_ratio").get<double>();
    m.classifier.config.centered = cfg.at("centered").get<bool>();
    m.classifier.config.balance = cfg.at("balance").get<bool>();
    m.classifier.config.balance_factor = cfg.at("balance_factor").get<double>();
    m.classifier.config.seed = cfg.at("seed").get<std::uint64_t>();
    m.classifier.config.validate();

    m.scaling = scaling_from_json(doc.at("scaling"));
    m.classifier.labels = doc.at("labels").get<std::vector<std::string>>();
    for (const json& s : doc.at("subspaces"))
      m.classifier.subspaces.push_back(subspace_from_json(s));

    for (const auto& s : m.classifier.subspaces)
      if (m.classifier.label_index(s.class_label) < 0)
        throw input_error("model: subspace label '" + s.class_label + "' missing from label list");
    return m;
  } catch (const json::exception& e) {
    throw input_error(std::string("model: missing or mistyped field: ") + e.what());
  }
}

void save_model(const std::string& path, const ModelFile& m) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write model file '" + path + "'");
  out << model_to_json(m) << '\n';
  if (!out.good()) throw input_error("write failed for '" + path + "'");
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace kpod
