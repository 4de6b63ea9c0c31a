#include "kpod/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "kpod/errors.hpp"

namespace kpod {

namespace {

// Jacobi is kept up to moderate sizes: it resolves the tiny tail eigenvalues
// of near-singular Grams with better relative accuracy than the tridiagonal
// route, which in turn is an order of magnitude faster for large classes.
constexpr int kJacobiMaxN = 256;

void check_symmetric(const Matrix& a) {
  if (a.rows != a.cols) throw input_error("sym_eigen: matrix is not square");
  double scale = 0.0;
  for (double v : a.a) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;
  for (int i = 0; i < a.rows; ++i)
    for (int j = i + 1; j < a.cols; ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol)
        throw input_error("sym_eigen: matrix is not symmetric");
}

// Sort descending, reorder eigenvector columns, clamp the slightly negative
// tail and reject anything significantly negative.
EigenDecomposition finalize(int n, std::vector<double> values, const std::vector<double>& vt) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return values[i] > values[j]; });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int c = 0; c < n; ++c) {
    const int src = order[c];
    out.values[c] = values[src];
    for (int r = 0; r < n; ++r) out.vectors(r, c) = vt[std::size_t(src) * n + r];
  }

  const double lam1 = out.values.empty() ? 0.0 : std::max(out.values[0], 0.0);
  const double neg_tol = 1e-8 * lam1;
  for (double& v : out.values) {
    if (v < -neg_tol)
      throw numerical_error("sym_eigen: significantly negative eigenvalue " + std::to_string(v) +
                            " (input is not positive semi-definite)");
    if (v < 0.0) v = 0.0;
  }
  return out;
}

}  // namespace

void TruncationPolicy::validate() const {
  if (!(energy_threshold > 0.0) || energy_threshold > 1.0)
    throw input_error("energy_threshold must be in (0, 1]");
  if (!(rank_floor_ratio >= 0.0) || rank_floor_ratio > 1.0)
    throw input_error("rank_floor_ratio must be in [0, 1]");
}

EigenDecomposition sym_eigen_jacobi(const Matrix& a) {
  check_symmetric(a);
  const int n = a.rows;
  std::vector<double> w = a.a;                 // working copy, both triangles
  std::vector<double> vt(std::size_t(n) * n);  // row i = eigenvector i
  for (int i = 0; i < n; ++i) vt[std::size_t(i) * n + i] = 1.0;

  double fro2 = 0.0;
  for (double v : w) fro2 += v * v;
  const double off_tol2 = 1e-24 * fro2;  // off-diagonal norm <= 1e-12 * ||A||_F

  for (int sweep = 0; sweep < 50; ++sweep) {
    double off2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off2 += w[std::size_t(i) * n + j] * w[std::size_t(i) * n + j];
    if (off2 <= off_tol2) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = w[std::size_t(p) * n + q];
        if (apq == 0.0) continue;

        const double app = w[std::size_t(p) * n + p];
        const double aqq = w[std::size_t(q) * n + q];
        const double theta = 0.5 * (aqq - app) / apq;
        double t;
        if (std::abs(theta) > 1e153) {
          t = 0.5 / theta;
        } else {
          t = ((theta >= 0.0) ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        w[std::size_t(p) * n + p] = app - t * apq;
        w[std::size_t(q) * n + q] = aqq + t * apq;
        w[std::size_t(p) * n + q] = 0.0;
        w[std::size_t(q) * n + p] = 0.0;

        double* rowp = w.data() + std::size_t(p) * n;
        double* rowq = w.data() + std::size_t(q) * n;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = rowp[k];
          const double akq = rowq[k];
          rowp[k] = akp - s * (akq + tau * akp);
          rowq[k] = akq + s * (akp - tau * akq);
        }
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          w[std::size_t(k) * n + p] = rowp[k];
          w[std::size_t(k) * n + q] = rowq[k];
        }

        double* vp = vt.data() + std::size_t(p) * n;
        double* vq = vt.data() + std::size_t(q) * n;
        for (int k = 0; k < n; ++k) {
          const double vkp = vp[k];
          const double vkq = vq[k];
          vp[k] = vkp - s * (vkq + tau * vkp);
          vq[k] = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }

  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = w[std::size_t(i) * n + i];
  return finalize(n, std::move(values), vt);
}

namespace {

// Householder reduction to tridiagonal form (classic tred2 recurrence,
// restructured so every inner loop walks contiguous rows: the working matrix
// keeps both triangles of each leading block in sync, and the transform
// accumulates into a separate matrix whose ROWS are the columns of Q.
// Outputs: d diagonal, e subdiagonal (e[0] unused), vt rows = Q columns.
void householder_tridiag(std::vector<double>& z, int n, std::vector<double>& d,
                         std::vector<double>& e, std::vector<double>& vt) {
  std::vector<double> h_of(n, 0.0);  // householder h per step, 0 = skipped
  std::vector<double> p(n), q(n);

  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double* zi = z.data() + std::size_t(i) * n;  // becomes the scaled u vector
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (int k = 0; k <= l; ++k) scale += std::abs(zi[k]);
      if (scale == 0.0) {
        e[i] = zi[l];
      } else {
        for (int k = 0; k <= l; ++k) {
          zi[k] /= scale;
          h += zi[k] * zi[k];
        }
        const double f = zi[l];
        const double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        zi[l] = f - g;

        // p = A u / h over the leading block (rows are fully mirrored)
#pragma omp parallel for schedule(static)
        for (int j = 0; j <= l; ++j) {
          const double* zj = z.data() + std::size_t(j) * n;
          double s = 0.0;
          for (int k = 0; k <= l; ++k) s += zj[k] * zi[k];
          p[j] = s / h;
        }
        double f2 = 0.0;
        for (int j = 0; j <= l; ++j) f2 += p[j] * zi[j];
        const double hh = f2 / (h + h);
        for (int j = 0; j <= l; ++j) q[j] = p[j] - hh * zi[j];

        // A <- A - q u^T - u q^T, full block so rows stay mirrored
#pragma omp parallel for schedule(static)
        for (int j = 0; j <= l; ++j) {
          double* zj = z.data() + std::size_t(j) * n;
          const double uj = zi[j];
          const double qj = q[j];
          for (int k = 0; k <= l; ++k) zj[k] -= qj * zi[k] + uj * q[k];
        }
      }
    } else {
      e[i] = zi[l];
    }
    h_of[i] = h;
  }
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) d[i] = z[std::size_t(i) * n + i];

  // accumulate Q; row j of vt tracks column j of the product
  vt.assign(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) vt[std::size_t(i) * n + i] = 1.0;
  std::vector<double> uh(n);
  for (int i = 1; i < n; ++i) {
    const int l = i - 1;
    if (h_of[i] == 0.0) continue;
    const double* ui = z.data() + std::size_t(i) * n;
    for (int k = 0; k <= l; ++k) uh[k] = ui[k] / h_of[i];
#pragma omp parallel for schedule(static)
    for (int j = 0; j <= l; ++j) {
      double* vj = vt.data() + std::size_t(j) * n;
      double g = 0.0;
      for (int k = 0; k <= l; ++k) g += ui[k] * vj[k];
      for (int k = 0; k <= l; ++k) vj[k] -= g * uh[k];
    }
  }
}

// Implicit-shift QL on the tridiagonal (d, e), classic tql2 with the
// global-scale deflation test (a local test never fires on the near-zero
// tail of a Gram spectrum). z stores candidate eigenvectors as ROWS here so
// the plane rotations touch contiguous memory.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z, int n) {
  const double eps = std::numeric_limits<double>::epsilon();

  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  for (int l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 50) throw numerical_error("sym_eigen: QL iteration failed to converge");

        // form the implicit shift
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0.0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = c, c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);

          double* zi = z.data() + std::size_t(i) * n;
          double* zi1 = z.data() + std::size_t(i + 1) * n;
          for (int k = 0; k < n; ++k) {
            h = zi1[k];
            zi1[k] = s * zi[k] + c * h;
            zi[k] = c * zi[k] - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

EigenDecomposition sym_eigen_tridiagonal(const Matrix& a) {
  check_symmetric(a);
  const int n = a.rows;
  std::vector<double> z = a.a;
  std::vector<double> d(n, 0.0), e(n, 0.0);
  if (n == 1) {
    d[0] = z[0];
    z[0] = 1.0;
    return finalize(n, std::move(d), z);
  }
  std::vector<double> vt;
  householder_tridiag(z, n, d, e, vt);
  tridiag_ql(d, e, vt, n);
  return finalize(n, std::move(d), vt);
}

EigenDecomposition sym_eigen(const Matrix& a) {
  return (a.rows <= kJacobiMaxN) ? sym_eigen_jacobi(a) : sym_eigen_tridiagonal(a);
}

int truncate(const EigenDecomposition& d, const TruncationPolicy& policy) {
  policy.validate();
  if (d.values.empty() || !(d.values[0] > 0.0))
    throw degenerate_error("truncate: all eigenvalues are zero");

  const double floor = policy.rank_floor_ratio * d.values[0];
  int m = 0;
  while (m < int(d.values.size()) && d.values[m] >= floor && d.values[m] > 0.0) ++m;

  if (policy.energy_threshold >= 1.0) return m;

  double total = 0.0;
  for (int i = 0; i < m; ++i) total += d.values[i];
  const double need = policy.energy_threshold * total;
  const double slack = 1e-12 * total;
  double cum = 0.0;
  for (int i = 0; i < m; ++i) {
    cum += d.values[i];
    if (cum + slack >= need) return i + 1;
  }
  return m;
}

}  // namespace kpod
