#pragma once

// Test-support reference computations, kept deliberately independent of the
// library's kernel-trick path: distances here come from explicit feature
// maps and Gram-Schmidt, not from Gram eigendecompositions.

#include <vector>

#include "kpod/kernel.hpp"
#include "kpod/matrix.hpp"

namespace kpod::oracle {

/// Explicit finite-dimensional feature map for kernels that admit one:
/// linear (identity) and degree-2 polynomial (monomial embedding with
/// sqrt(2) cross-term weights and sqrt(2*coef0) linear terms).
/// Guarantees <map(x), map(y)> == eval_kernel(x, y).
struct ExplicitMap {
  KernelSpec spec;
  int dims = 0;  // attribute-space dimension

  int mapped_dim() const;
  std::vector<double> map(const SparseVec& x) const;
};

/// Euclidean distance from map(query) to the span of the mapped samples,
/// via modified Gram-Schmidt with one reorthogonalization pass. When
/// 0 <= p < rank, uses the top-p left singular directions instead
/// (deflated power iteration on the explicit covariance).
double explicit_distance(const ExplicitMap& m, const std::vector<SparseVec>& samples,
                         const SparseVec& query, int p = -1);

/// Same construction around the sample mean: distance from the centered
/// query image to the span of the centered sample images.
double explicit_centered_distance(const ExplicitMap& m, const std::vector<SparseVec>& samples,
                                  const SparseVec& query);

/// max over `trials` random unit vectors w of sum_i <w, column_i(data)>^2.
/// Column i of `data` is the i-th sample vector.
double brute_force_pod_max(const Matrix& data, int trials, std::uint64_t seed);

/// The same objective evaluated at a specific unit vector.
double pod_objective(const Matrix& data, const std::vector<double>& w);

}  // namespace kpod::oracle
