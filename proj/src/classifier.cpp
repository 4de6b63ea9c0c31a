#include "kpod/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include "kpod/errors.hpp"

namespace kpod {

void TrainConfig::validate() const {
  kernel.validate();
  policy.validate();
  if (!(balance_factor >= 2.0)) throw input_error("balance_factor must be >= 2");
}

int Classifier::class_size(const std::string& label) const {
  int total = 0;
  for (const auto& s : subspaces)
    if (s.class_label == label) total += s.sample_count();
  return total;
}

int Classifier::reference_size() const {
  int ref = 0;
  for (const auto& l : labels) {
    const int sz = class_size(l);
    if (ref == 0 || sz < ref) ref = sz;
  }
  return ref;
}

int Classifier::label_index(const std::string& label) const {
  const auto it = std::lower_bound(labels.begin(), labels.end(), label);
  if (it == labels.end() || *it != label) return -1;
  return int(it - labels.begin());
}

std::vector<std::vector<SparseVec>> split_class(const std::vector<SparseVec>& samples,
                                                int reference, double balance_factor) {
  if (samples.empty()) throw input_error("split_class: empty sample list");
  if (reference < 1) throw input_error("split_class: reference size must be >= 1");

  const std::size_t n = samples.size();
  if (double(n) < balance_factor * double(reference)) return {samples};

  // round half-to-even, the default FP rounding mode
  int q = int(std::nearbyint(double(n) / double(reference)));
  q = std::max(q, 1);
  q = std::min<int>(q, int(n));

  std::vector<std::vector<SparseVec>> subsets(q);
  for (int k = 0; k < q; ++k)
    for (std::size_t i = k; i < n; i += q) subsets[k].push_back(samples[i]);
  return subsets;
}

namespace {

struct FitTask {
  std::string label;
  int subset_index;
  std::vector<SparseVec> samples;
};

std::vector<SubspaceModel> fit_all(const std::vector<FitTask>& tasks, const TrainConfig& config) {
  std::vector<SubspaceModel> out(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < int(tasks.size()); ++i) {
    try {
      out[i] = fit_subspace(config.kernel, tasks[i].label, tasks[i].subset_index,
                            tasks[i].samples, config.policy, config.centered);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::map<std::string, std::vector<SparseVec>> group_by_label(const std::vector<Sample>& dataset) {
  std::map<std::string, std::vector<SparseVec>> groups;
  for (const auto& s : dataset) groups[s.label].push_back(s.features);
  return groups;
}

}  // namespace

Classifier train(const std::vector<Sample>& dataset, const TrainConfig& config) {
  config.validate();
  const auto groups = group_by_label(dataset);
  if (groups.size() < 2) throw input_error("train: need at least 2 distinct class labels");

  std::size_t reference = dataset.size();
  for (const auto& [label, samps] : groups) reference = std::min(reference, samps.size());

  std::vector<FitTask> tasks;
  for (const auto& [label, samps] : groups) {
    if (config.balance) {
      auto subsets = split_class(samps, int(reference), config.balance_factor);
      for (std::size_t k = 0; k < subsets.size(); ++k)
        tasks.push_back({label, int(k), std::move(subsets[k])});
    } else {
      tasks.push_back({label, 0, samps});
    }
  }

  Classifier c;
  c.config = config;
  for (const auto& [label, samps] : groups) c.labels.push_back(label);
  c.subspaces = fit_all(tasks, config);
  return c;
}

Prediction predict(const Classifier& c, const SparseVec& query) {
  Prediction p;
  p.subspace_distances.resize(c.subspaces.size());
  p.class_distances.assign(c.labels.size(), 0.0);

  std::vector<bool> seen(c.labels.size(), false);
  for (std::size_t i = 0; i < c.subspaces.size(); ++i) {
    const double d = distance(c.subspaces[i], c.config.kernel, query);
    p.subspace_distances[i] = d;
    const int li = c.label_index(c.subspaces[i].class_label);
    if (!seen[li] || d < p.class_distances[li]) {
      p.class_distances[li] = d;
      seen[li] = true;
    }
  }

  // argmin; strict less-than keeps the earlier label on exact ties
  std::size_t best = 0;
  for (std::size_t li = 1; li < c.labels.size(); ++li)
    if (p.class_distances[li] < p.class_distances[best]) best = li;
  p.label = c.labels[best];
  return p;
}

static std::vector<Prediction> predict_batch_impl(const Classifier& c,
                                                  const std::vector<SparseVec>& queries,
                                                  bool parallel) {
  std::vector<Prediction> out(queries.size());
  std::vector<std::exception_ptr> errors(queries.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (int i = 0; i < int(queries.size()); ++i) {
    try {
      out[i] = predict(c, queries[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<Prediction> predict_batch(const Classifier& c, const std::vector<SparseVec>& queries) {
  return predict_batch_impl(c, queries, true);
}

std::vector<Prediction> predict_batch_serial(const Classifier& c,
                                             const std::vector<SparseVec>& queries) {
  return predict_batch_impl(c, queries, false);
}

Classifier add_class(const Classifier& c, const std::string& label,
                     const std::vector<SparseVec>& samples) {
  c.config.validate();
  if (c.label_index(label) >= 0) throw input_error("add_class: label '" + label + "' already present");
  if (samples.empty()) throw input_error("add_class: class '" + label + "' has no samples");

  const int reference = std::min<int>(c.reference_size(), int(samples.size()));

  std::vector<FitTask> tasks;
  if (c.config.balance) {
    auto subsets = split_class(samples, reference, c.config.balance_factor);
    for (std::size_t k = 0; k < subsets.size(); ++k)
      tasks.push_back({label, int(k), std::move(subsets[k])});
  } else {
    tasks.push_back({label, 0, samples});
  }
  std::vector<SubspaceModel> fitted = fit_all(tasks, c.config);

  Classifier out;
  out.config = c.config;
  out.labels = c.labels;
  out.labels.insert(std::upper_bound(out.labels.begin(), out.labels.end(), label), label);

  // existing models are reused byte-identically; new ones slot in label order
  out.subspaces.reserve(c.subspaces.size() + fitted.size());
  bool inserted = false;
  for (const auto& s : c.subspaces) {
    if (!inserted && s.class_label > label) {
      for (auto& f : fitted) out.subspaces.push_back(std::move(f));
      inserted = true;
    }
    out.subspaces.push_back(s);
  }
  if (!inserted)
    for (auto& f : fitted) out.subspaces.push_back(std::move(f));
  return out;
}

Classifier remove_class(const Classifier& c, const std::string& label) {
  if (c.label_index(label) < 0) throw input_error("remove_class: unknown label '" + label + "'");
  if (c.labels.size() <= 2)
    throw input_error("remove_class: removal would leave fewer than 2 classes");

  Classifier out;
  out.config = c.config;
  for (const auto& l : c.labels)
    if (l != label) out.labels.push_back(l);
  for (const auto& s : c.subspaces)
    if (s.class_label != label) out.subspaces.push_back(s);
  return out;
}

Metrics evaluate(const Classifier& c, const std::vector<Sample>& test) {
  if (test.empty()) throw input_error("evaluate: test set is empty");
  for (const auto& s : test)
    if (c.label_index(s.label) < 0)
      throw input_error("evaluate: test label '" + s.label + "' was not in the training set");

  std::vector<SparseVec> queries;
  queries.reserve(test.size());
  for (const auto& s : test) queries.push_back(s.features);
  const std::vector<Prediction> preds = predict_batch(c, queries);

  Metrics m;
  m.labels = c.labels;
  const std::size_t L = c.labels.size();
  m.confusion.assign(L, std::vector<int>(L, 0));

  int correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int t = c.label_index(test[i].label);
    const int p = c.label_index(preds[i].label);
    m.confusion[t][p] += 1;
    if (t == p) ++correct;
  }
  m.accuracy = double(correct) / double(test.size());

  m.recall.assign(L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    int row = 0;
    for (std::size_t j = 0; j < L; ++j) row += m.confusion[l][j];
    if (row > 0) m.recall[l] = double(m.confusion[l][l]) / double(row);
  }
  return m;
}

}  // namespace kpod
