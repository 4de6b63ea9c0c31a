#include "kpod/subspace.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "kpod/errors.hpp"

namespace kpod {

namespace {

// K~[i][j] = K[i][j] - rm[i] - rm[j] + tm. The (rm[i] + rm[j]) grouping keeps
// the result bit-exactly symmetric.
Matrix double_centered(const GramMatrix& g, const CenteringStats& st) {
  const int n = g.n;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = g.at(i, j) - (st.row_means[i] + st.row_means[j]) + st.total_mean;
  return m;
}

// Cholesky of the p x p mode Gram M = coeffs * K * coeffs^T (which is ~I),
// then coeffs <- L^-1 * coeffs. Leaves the spanned subspace untouched while
// making the basis orthonormal in the kernel inner product. Accumulation in
// extended precision: the 1/sqrt(lambda) scaling of near-floor modes turns
// cancellation noise into real basis skew otherwise.
void reorthonormalize(Matrix& coeffs, const GramMatrix& k) {
  const int p = coeffs.rows;
  const int n = coeffs.cols;

  std::vector<long double> t(std::size_t(p) * n, 0.0L);  // coeffs * K
#pragma omp parallel for schedule(static)
  for (int i = 0; i < p; ++i) {
    const double* ci = coeffs.row(i);
    long double* ti = t.data() + std::size_t(i) * n;
    for (int l = 0; l < n; ++l) {
      const long double c = ci[l];
      if (c == 0.0L) continue;
      const double* krow = k.entries.data() + std::size_t(l) * n;
      for (int j = 0; j < n; ++j) ti[j] += c * krow[j];
    }
  }

  Matrix m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= i; ++j) {
      long double s = 0.0L;
      const long double* ti = t.data() + std::size_t(i) * n;
      const double* cj = coeffs.row(j);
      for (int l = 0; l < n; ++l) s += ti[l] * cj[l];
      m(i, j) = double(s);
      m(j, i) = double(s);
    }

  // lower Cholesky factor of m, in place
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (int l = 0; l < j; ++l) s -= m(i, l) * m(j, l);
      if (i == j) {
        if (!(s > 0.0))
          throw numerical_error("subspace fit: mode normalization failed (modes not independent)");
        m(i, i) = std::sqrt(s);
      } else {
        m(i, j) = s / m(j, j);
      }
    }
  }

  // forward-substitute L * coeffs_new = coeffs, row block at a time
  for (int i = 0; i < p; ++i) {
    double* ci = coeffs.row(i);
    for (int j = 0; j < i; ++j) {
      const double lij = m(i, j);
      const double* cj = coeffs.row(j);
      for (int l = 0; l < n; ++l) ci[l] -= lij * cj[l];
    }
    const double inv = 1.0 / m(i, i);
    for (int l = 0; l < n; ++l) ci[l] *= inv;
  }
}

std::vector<double> coords_from_kvec(const SubspaceModel& m, const std::vector<double>& v) {
  const int p = m.coeffs.rows;
  const int n = m.coeffs.cols;
  std::vector<double> alpha(p, 0.0);
  for (int i = 0; i < p; ++i) {
    const double* ci = m.coeffs.row(i);
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += ci[k] * v[k];
    alpha[i] = s;
  }
  return alpha;
}

}  // namespace

namespace detail {

std::vector<double> center_kernel_vector(const SubspaceModel& m, const std::vector<double>& v) {
  const std::size_t n = v.size();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= double(n);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = v[k] - (m.stats.row_means[k] + mean) + m.stats.total_mean;
  return out;
}

}  // namespace detail

SubspaceModel fit_subspace(const KernelSpec& spec, std::string class_label, int subset_index,
                           std::vector<SparseVec> samples, const TruncationPolicy& policy,
                           bool centered) {
  spec.validate();
  policy.validate();
  if (samples.empty())
    throw input_error("fit: class '" + class_label + "' has no samples");

  const GramMatrix k = gram(spec, samples);
  const int n = k.n;

  SubspaceModel model;
  model.class_label = std::move(class_label);
  model.subset_index = subset_index;
  model.centered = centered;

  Matrix work;
  if (centered) {
    model.stats = centering_stats(k);
    work = double_centered(k, model.stats);
  } else {
    work = Matrix(n, n, k.entries);
  }

  const EigenDecomposition eig = sym_eigen(work);
  int p = 0;
  try {
    p = truncate(eig, policy);
  } catch (const degenerate_error&) {
    throw degenerate_error("fit: class '" + model.class_label + "' subset " +
                           std::to_string(subset_index) +
                           " is degenerate (all eigenvalues zero)");
  }

  model.eigenvalues.assign(eig.values.begin(), eig.values.begin() + p);
  model.coeffs = Matrix(p, n);
  for (int i = 0; i < p; ++i) {
    const double inv_root = 1.0 / std::sqrt(eig.values[i]);
    for (int kk = 0; kk < n; ++kk) model.coeffs(i, kk) = eig.vectors(kk, i) * inv_root;
  }

  if (centered) {
    // mode orthonormality must hold in the centered inner product
    GramMatrix kc;
    kc.n = n;
    kc.entries = work.a;
    reorthonormalize(model.coeffs, kc);
  } else {
    reorthonormalize(model.coeffs, k);
  }

  model.samples = std::move(samples);
  return model;
}

std::vector<double> coordinates(const SubspaceModel& m, const KernelSpec& spec,
                                const SparseVec& query) {
  spec.validate();
  validate_features(query);
  std::vector<double> v = detail::kernel_vector_unchecked(spec, m.samples, query);
  if (m.centered) v = detail::center_kernel_vector(m, v);
  return coords_from_kvec(m, v);
}

double distance(const SubspaceModel& m, const KernelSpec& spec, const SparseVec& query) {
  spec.validate();
  validate_features(query);

  std::vector<double> v = detail::kernel_vector_unchecked(spec, m.samples, query);
  const double self_raw = detail::eval_kernel_unchecked(spec, query, query);

  double self = self_raw;
  if (m.centered) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    self = self_raw - 2.0 * mean + m.stats.total_mean;
    v = detail::center_kernel_vector(m, v);
  }

  const std::vector<double> alpha = coords_from_kvec(m, v);
  double proj2 = 0.0;
  for (double a : alpha) proj2 += a * a;

  double rad = self - proj2;
  if (rad < 0.0) {
    if (rad >= -1e-8 * self_raw) {
      rad = 0.0;
    } else {
      throw numerical_error("distance: negative radicand " + std::to_string(rad) +
                            " (mode normalization is broken)");
    }
  }
  return std::sqrt(rad);
}

}  // namespace kpod
