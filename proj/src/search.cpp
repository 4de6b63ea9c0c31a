#include "kpod/search.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include "kpod/errors.hpp"
#include "kpod/rng.hpp"

namespace kpod {

std::vector<double> auto_sigma_grid(const std::vector<Sample>& train, int span,
                                    std::uint64_t seed) {
  if (train.empty()) throw input_error("auto_sigma_grid: training set is empty");
  if (span < 0) throw input_error("auto_sigma_grid: span must be >= 0");

  // subsample to bound the O(m^2) pairwise pass
  std::vector<std::size_t> idx(train.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  SplitMix64 rng(seed ^ 0x5ca1ab1eull);
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.next() % i]);
  const std::size_t m = std::min<std::size_t>(idx.size(), 200);

  std::vector<double> d2;
  d2.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      d2.push_back(squared_distance(train[idx[i]].features, train[idx[j]].features));

  double sigma0 = 1.0;
  if (!d2.empty()) {
    std::nth_element(d2.begin(), d2.begin() + d2.size() / 2, d2.end());
    const double med = d2[d2.size() / 2];
    if (med > 0.0) sigma0 = std::sqrt(med / 2.0);
  }

  std::vector<double> grid;
  for (int k = -span; k <= span; ++k) grid.push_back(sigma0 * std::ldexp(1.0, k));
  return grid;
}

namespace {

struct FoldSplit {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

// Stratified fold assignment: per class, seeded shuffle then round-robin.
std::vector<FoldSplit> make_folds(const std::vector<Sample>& data, int folds,
                                  std::uint64_t seed, int per_class_cap) {
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < data.size(); ++i) by_label[data[i].label].push_back(i);

  std::vector<std::vector<std::size_t>> fold_members(folds);
  SplitMix64 rng(seed);
  for (auto& [label, members] : by_label) {
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[rng.next() % i]);
    std::size_t take = members.size();
    if (per_class_cap > 0) take = std::min<std::size_t>(take, std::size_t(per_class_cap));
    if (take < std::size_t(2))
      throw input_error("grid_search: class '" + label + "' is too small for cross-validation");
    for (std::size_t i = 0; i < take; ++i) fold_members[i % folds].push_back(members[i]);
  }

  std::vector<FoldSplit> out(folds);
  for (int f = 0; f < folds; ++f) {
    for (int g = 0; g < folds; ++g) {
      auto& dst = (g == f) ? out[f].test : out[f].train;
      for (std::size_t i : fold_members[g]) dst.push_back(data[i]);
    }
  }
  return out;
}

}  // namespace

SearchResult grid_search(const std::vector<Sample>& train, const TrainConfig& base,
                         const SearchSpec& spec) {
  if (spec.folds < 2) throw input_error("grid_search: need at least 2 folds");
  if (spec.sigmas.empty()) throw input_error("grid_search: sigma grid is empty");
  base.validate();

  std::vector<double> energies = spec.energies;
  if (energies.empty()) energies.push_back(base.policy.energy_threshold);

  const std::vector<FoldSplit> folds = make_folds(train, spec.folds, spec.seed, spec.per_class_cap);

  struct Task {
    std::size_t grid_index;
    int fold;
    TrainConfig config;
  };
  std::vector<SearchPoint> points;
  std::vector<Task> tasks;
  for (double sigma : spec.sigmas) {
    for (double energy : energies) {
      TrainConfig cfg = base;
      cfg.kernel.sigma = sigma;
      cfg.policy.energy_threshold = energy;
      cfg.validate();
      for (int f = 0; f < spec.folds; ++f) tasks.push_back({points.size(), f, cfg});
      points.push_back({sigma, energy, 0.0});
    }
  }

  std::vector<int> correct(tasks.size(), 0);
  std::vector<int> total(tasks.size(), 0);
  std::vector<std::exception_ptr> errors(tasks.size());

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < int(tasks.size()); ++t) {
    try {
      const FoldSplit& fs = folds[tasks[t].fold];
      const Classifier c = kpod::train(fs.train, tasks[t].config);
      std::vector<SparseVec> queries;
      queries.reserve(fs.test.size());
      for (const auto& s : fs.test) queries.push_back(s.features);
      const auto preds = predict_batch_serial(c, queries);
      int ok = 0;
      for (std::size_t i = 0; i < fs.test.size(); ++i)
        if (preds[i].label == fs.test[i].label) ++ok;
      correct[t] = ok;
      total[t] = int(fs.test.size());
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    points[tasks[t].grid_index].cv_accuracy += correct[t];
  }
  std::vector<int> totals(points.size(), 0);
  for (std::size_t t = 0; t < tasks.size(); ++t) totals[tasks[t].grid_index] += total[t];
  for (std::size_t g = 0; g < points.size(); ++g)
    points[g].cv_accuracy = totals[g] > 0 ? points[g].cv_accuracy / totals[g] : 0.0;

  SearchResult result;
  result.evaluated = points;
  result.best = points[0];
  for (const auto& p : points)
    if (p.cv_accuracy > result.best.cv_accuracy) result.best = p;
  return result;
}

}  // namespace kpod
