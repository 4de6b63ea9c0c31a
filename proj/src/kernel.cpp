#include "kpod/kernel.hpp"

#include <cmath>
#include <cstddef>

#include "kpod/errors.hpp"

namespace kpod {

const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::rbf: return "rbf";
    case KernelFamily::linear: return "linear";
    case KernelFamily::polynomial: return "polynomial";
  }
  return "rbf";
}

KernelFamily family_from_name(const std::string& name) {
  if (name == "rbf") return KernelFamily::rbf;
  if (name == "linear") return KernelFamily::linear;
  if (name == "poly" || name == "polynomial") return KernelFamily::polynomial;
  throw input_error("unknown kernel family '" + name + "' (expected rbf, linear or poly)");
}

void KernelSpec::validate() const {
  if (family == KernelFamily::rbf && !(sigma > 0.0))
    throw input_error("rbf kernel requires sigma > 0");
  if (family == KernelFamily::polynomial && degree < 1)
    throw input_error("polynomial kernel requires degree >= 1");
  if (!std::isfinite(sigma) || !std::isfinite(coef0))
    throw input_error("kernel hyperparameters must be finite");
}

double sigma_from_gamma(double gamma) {
  if (!(gamma > 0.0)) throw input_error("gamma must be > 0");
  return 1.0 / std::sqrt(2.0 * gamma);
}

void validate_features(const SparseVec& v) {
  std::int32_t prev = 0;
  for (const auto& [idx, val] : v) {
    if (idx <= prev) throw input_error("feature indices must be strictly increasing and >= 1");
    if (!std::isfinite(val)) throw input_error("non-finite feature value at index " + std::to_string(idx));
    prev = idx;
  }
}

void validate_features(const std::vector<SparseVec>& samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      validate_features(samples[i]);
    } catch (const input_error& e) {
      throw input_error("sample " + std::to_string(i) + ": " + e.what());
    }
  }
}

double dot(const SparseVec& x, const SparseVec& y) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].first == y[j].first) {
      s += x[i].second * y[j].second;
      ++i;
      ++j;
    } else if (x[i].first < y[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double squared_distance(const SparseVec& x, const SparseVec& y) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].first == y[j].first) {
      const double d = x[i].second - y[j].second;
      s += d * d;
      ++i;
      ++j;
    } else if (x[i].first < y[j].first) {
      s += x[i].second * x[i].second;
      ++i;
    } else {
      s += y[j].second * y[j].second;
      ++j;
    }
  }
  for (; i < x.size(); ++i) s += x[i].second * x[i].second;
  for (; j < y.size(); ++j) s += y[j].second * y[j].second;
  return s;
}

namespace detail {

double eval_kernel_unchecked(const KernelSpec& spec, const SparseVec& x, const SparseVec& y) {
  switch (spec.family) {
    case KernelFamily::rbf:
      return std::exp(-squared_distance(x, y) / (2.0 * spec.sigma * spec.sigma));
    case KernelFamily::linear:
      return dot(x, y);
    case KernelFamily::polynomial: {
      const double base = dot(x, y) + spec.coef0;
      double r = base;
      for (int k = 1; k < spec.degree; ++k) r *= base;
      return r;
    }
  }
  return 0.0;
}

std::vector<double> kernel_vector_unchecked(const KernelSpec& spec,
                                            const std::vector<SparseVec>& samples,
                                            const SparseVec& query) {
  std::vector<double> v(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k)
    v[k] = eval_kernel_unchecked(spec, samples[k], query);
  return v;
}

}  // namespace detail

double eval_kernel(const KernelSpec& spec, const SparseVec& x, const SparseVec& y) {
  spec.validate();
  validate_features(x);
  validate_features(y);
  return detail::eval_kernel_unchecked(spec, x, y);
}

static GramMatrix gram_impl(const KernelSpec& spec, const std::vector<SparseVec>& samples,
                            bool parallel) {
  spec.validate();
  if (samples.empty()) throw input_error("gram: sample list is empty");
  validate_features(samples);

  const int n = int(samples.size());
  GramMatrix g;
  g.n = n;
  g.entries.assign(std::size_t(n) * n, 0.0);

#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (int i = 0; i < n; ++i) {
    double* row = g.entries.data() + std::size_t(i) * n;
    for (int j = i; j < n; ++j) row[j] = detail::eval_kernel_unchecked(spec, samples[i], samples[j]);
  }
  // mirror the strict upper triangle
  for (int i = 0; i < n; ++i) {
    const double* row = g.entries.data() + std::size_t(i) * n;
    for (int j = i + 1; j < n; ++j) g.entries[std::size_t(j) * n + i] = row[j];
  }
  return g;
}

GramMatrix gram(const KernelSpec& spec, const std::vector<SparseVec>& samples) {
  return gram_impl(spec, samples, true);
}

GramMatrix gram_serial(const KernelSpec& spec, const std::vector<SparseVec>& samples) {
  return gram_impl(spec, samples, false);
}

std::vector<double> kernel_vector(const KernelSpec& spec, const std::vector<SparseVec>& samples,
                                  const SparseVec& query) {
  spec.validate();
  if (samples.empty()) throw input_error("kernel_vector: sample list is empty");
  validate_features(samples);
  validate_features(query);
  return detail::kernel_vector_unchecked(spec, samples, query);
}

CenteringStats centering_stats(const GramMatrix& g) {
  CenteringStats s;
  const int n = g.n;
  s.row_means.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += g.at(k, j);
    s.row_means[j] = acc / n;
  }
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += s.row_means[j];
  s.total_mean = acc / n;
  return s;
}

}  // namespace kpod
