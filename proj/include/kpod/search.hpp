#pragma once

#include <cstdint>
#include <vector>

#include "kpod/classifier.hpp"

namespace kpod {

/// Hyperparameter grid for k-fold cross-validated selection of the rbf
/// width (and optionally the energy threshold).
struct SearchSpec {
  std::vector<double> sigmas;
  std::vector<double> energies;  // empty = keep the base config's threshold
  int folds = 5;
  std::uint64_t seed = 0;
  int per_class_cap = 0;  // subsample cap per class during CV; 0 = use all
};

struct SearchPoint {
  double sigma = 0.0;
  double energy = 0.0;
  double cv_accuracy = 0.0;
};

struct SearchResult {
  SearchPoint best;
  std::vector<SearchPoint> evaluated;  // grid enumeration order
};

/// Data-driven log grid: sigma0 * 2^k for k in [-span, span], where sigma0
/// makes the median pairwise squared distance map to exp(-1).
std::vector<double> auto_sigma_grid(const std::vector<Sample>& train, int span,
                                    std::uint64_t seed = 0);

/// Stratified, seeded k-fold cross-validation over the grid. Ties keep the
/// earlier grid point. Every class must have at least 2 samples.
SearchResult grid_search(const std::vector<Sample>& train, const TrainConfig& base,
                         const SearchSpec& spec);

}  // namespace kpod
