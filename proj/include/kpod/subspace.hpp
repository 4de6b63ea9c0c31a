#pragma once

#include <string>
#include <vector>

#include "kpod/eig.hpp"
#include "kpod/kernel.hpp"

namespace kpod {

/// One class subset's subspace in feature space: the retained training
/// samples, scaled eigenvector coefficients defining an orthonormal mode
/// basis, and centering statistics when the centered variant is in use.
/// Immutable after fit; safe to share across threads for queries.
struct SubspaceModel {
  std::string class_label;
  int subset_index = 0;
  std::vector<SparseVec> samples;
  Matrix coeffs;                    // p x n_s; row i scales mode i
  std::vector<double> eigenvalues;  // retained, descending
  bool centered = false;
  CenteringStats stats;             // populated when centered

  int mode_count() const { return coeffs.rows; }
  int sample_count() const { return int(samples.size()); }
};

/// Builds the Gram matrix (double-centered when centered is set),
/// eigendecomposes, truncates under the policy, and stores mode coefficients
/// V^i[k]/sqrt(lambda_i), re-orthonormalized in the kernel inner product.
SubspaceModel fit_subspace(const KernelSpec& spec, std::string class_label, int subset_index,
                           std::vector<SparseVec> samples, const TruncationPolicy& policy,
                           bool centered);

/// Projection coordinates of the mapped query on the subspace modes.
std::vector<double> coordinates(const SubspaceModel& m, const KernelSpec& spec,
                                const SparseVec& query);

/// Euclidean distance in feature space from the mapped query to the
/// subspace, via the Pythagorean identity: norm^2 minus the squared
/// projection coordinates.
double distance(const SubspaceModel& m, const KernelSpec& spec, const SparseVec& query);

namespace detail {
// Query-side centering of a raw kernel vector against the model's stats.
std::vector<double> center_kernel_vector(const SubspaceModel& m, const std::vector<double>& v);
}  // namespace detail

}  // namespace kpod
