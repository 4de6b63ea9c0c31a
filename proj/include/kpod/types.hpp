#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace kpod {

/// Sparse feature vector: (index, value) pairs with strictly increasing
/// 1-based indices. Absent indices are zero.
using FeatureEntry = std::pair<std::int32_t, double>;
using SparseVec = std::vector<FeatureEntry>;

/// One labeled attribute vector. Labels are opaque tags.
struct Sample {
  std::string label;
  SparseVec features;
};

/// Dense-to-sparse conversion (1-based indices, exact zeros dropped).
inline SparseVec to_sparse(const std::vector<double>& dense) {
  SparseVec v;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) v.emplace_back(std::int32_t(i) + 1, dense[i]);
  return v;
}

inline std::vector<double> to_dense(const SparseVec& v, std::size_t dim) {
  std::vector<double> d(dim, 0.0);
  for (const auto& [idx, val] : v)
    if (idx >= 1 && std::size_t(idx) <= dim) d[std::size_t(idx) - 1] = val;
  return d;
}

/// Largest feature index appearing in any sample, 0 if none.
inline std::int32_t max_feature_index(const std::vector<Sample>& samples) {
  std::int32_t m = 0;
  for (const auto& s : samples)
    if (!s.features.empty()) m = std::max(m, s.features.back().first);
  return m;
}

}  // namespace kpod
