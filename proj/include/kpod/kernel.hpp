#pragma once

#include <string>
#include <vector>

#include "kpod/types.hpp"

namespace kpod {

enum class KernelFamily { rbf, linear, polynomial };

const char* family_name(KernelFamily f);
KernelFamily family_from_name(const std::string& name);

/// Kernel family and hyperparameters. sigma is the rbf width in
/// exp(-|x-y|^2 / (2 sigma^2)); degree and coef0 apply to the polynomial
/// kernel (<x,y> + coef0)^degree.
struct KernelSpec {
  KernelFamily family = KernelFamily::rbf;
  double sigma = 1.2;
  int degree = 2;
  double coef0 = 0.0;

  void validate() const;
};

/// LIBSVM-style width conversion: exp(-gamma |x-y|^2) == rbf with
/// sigma = 1/sqrt(2 gamma).
double sigma_from_gamma(double gamma);

double dot(const SparseVec& x, const SparseVec& y);
double squared_distance(const SparseVec& x, const SparseVec& y);

double eval_kernel(const KernelSpec& spec, const SparseVec& x, const SparseVec& y);

/// Symmetric matrix of pairwise kernel values over one sample set. The upper
/// triangle is computed once and mirrored, so at(i,j) == at(j,i) bit-exactly.
struct GramMatrix {
  int n = 0;
  std::vector<double> entries;  // row-major n*n

  double at(int i, int j) const { return entries[std::size_t(i) * n + j]; }
};

GramMatrix gram(const KernelSpec& spec, const std::vector<SparseVec>& samples);

/// Single-threaded reference assembly; must match gram() bit for bit.
GramMatrix gram_serial(const KernelSpec& spec, const std::vector<SparseVec>& samples);

/// v[k] = K(samples[k], query).
std::vector<double> kernel_vector(const KernelSpec& spec, const std::vector<SparseVec>& samples,
                                  const SparseVec& query);

/// Row means and grand mean of a Gram matrix, the statistics needed to
/// center kernel evaluations around the feature-space mean.
struct CenteringStats {
  std::vector<double> row_means;
  double total_mean = 0.0;
};

CenteringStats centering_stats(const GramMatrix& g);

/// Throws input_error if any feature value is non-finite or indices are not
/// strictly increasing.
void validate_features(const SparseVec& v);
void validate_features(const std::vector<SparseVec>& samples);

namespace detail {
// Fast path after validate_features has run on both arguments.
double eval_kernel_unchecked(const KernelSpec& spec, const SparseVec& x, const SparseVec& y);
std::vector<double> kernel_vector_unchecked(const KernelSpec& spec,
                                            const std::vector<SparseVec>& samples,
                                            const SparseVec& query);
}  // namespace detail

}  // namespace kpod
