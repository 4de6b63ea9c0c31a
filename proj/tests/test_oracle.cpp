#include <doctest.h>

#include <cmath>

#include "explicit_map.hpp"
#include "kpod/eig.hpp"
#include "kpod/rng.hpp"

using namespace kpod;
using oracle::ExplicitMap;

namespace {

SparseVec sv(std::initializer_list<double> dense) {
  return to_sparse(std::vector<double>(dense));
}

SparseVec random_vec(SplitMix64& rng, int dims) {
  std::vector<double> v(dims);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return to_sparse(v);
}

}  // namespace

TEST_CASE("explicit map reproduces the kernel inner product") {
  SplitMix64 rng(5);
  for (int dims = 1; dims <= 3; ++dims) {
    for (const double coef0 : {0.0, 0.7, 1.3}) {
      KernelSpec spec;
      spec.family = KernelFamily::polynomial;
      spec.degree = 2;
      spec.coef0 = coef0;
      const ExplicitMap em{spec, dims};
      for (int rep = 0; rep < 100; ++rep) {
        const auto x = random_vec(rng, dims);
        const auto y = random_vec(rng, dims);
        const auto mx = em.map(x);
        const auto my = em.map(y);
        double ip = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) ip += mx[i] * my[i];
        CHECK(std::abs(ip - eval_kernel(spec, x, y)) <= 1e-10);
      }
    }
  }
  KernelSpec lin;
  lin.family = KernelFamily::linear;
  const ExplicitMap le{lin, 3};
  const auto m = le.map(sv({1, -2, 0.5}));
  CHECK(m == std::vector<double>{1.0, -2.0, 0.5});
}

TEST_CASE("homogeneous degree-2 map of orthogonal-in-feature-space points") {
  KernelSpec spec;
  spec.family = KernelFamily::polynomial;
  spec.degree = 2;
  spec.coef0 = 0.0;
  const ExplicitMap em{spec, 2};
  const auto a = em.map(sv({1, 1}));
  const auto b = em.map(sv({1, -1}));
  double ip = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ip += a[i] * b[i];
  CHECK(std::abs(ip) <= 1e-12);  // (x.y)^2 with x.y = 0
}

TEST_CASE("explicit_distance basics") {
  KernelSpec lin;
  lin.family = KernelFamily::linear;
  const ExplicitMap em{lin, 2};
  CHECK(oracle::explicit_distance(em, {sv({1, 0})}, sv({0, 1})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oracle::explicit_distance(em, {sv({1, 0}), sv({0, 1})}, sv({0.3, -0.4})) <= 1e-12);
}

TEST_CASE("explicit_distance is invariant under sample permutation") {
  SplitMix64 rng(6);
  KernelSpec spec;
  spec.family = KernelFamily::polynomial;
  spec.degree = 2;
  spec.coef0 = 0.5;
  const ExplicitMap em{spec, 3};
  std::vector<SparseVec> samples;
  for (int i = 0; i < 5; ++i) samples.push_back(random_vec(rng, 3));
  const auto q = random_vec(rng, 3);
  const double d0 = oracle::explicit_distance(em, samples, q);
  for (int rep = 0; rep < 6; ++rep) {
    for (std::size_t i = samples.size(); i > 1; --i)
      std::swap(samples[i - 1], samples[rng.next() % i]);
    CHECK(std::abs(oracle::explicit_distance(em, samples, q) - d0) <= 1e-9);
  }
}

TEST_CASE("truncated explicit_distance picks the dominant directions") {
  KernelSpec lin;
  lin.family = KernelFamily::linear;
  const ExplicitMap em{lin, 2};
  // strongly anisotropic sample cloud: top singular direction is x
  const std::vector<SparseVec> samples{sv({10, 0.1}), sv({-9, 0.12}), sv({8, -0.1})};
  const double d1 = oracle::explicit_distance(em, samples, sv({0, 1}), 1);
  CHECK(d1 == doctest::Approx(1.0).epsilon(1e-3));  // query ~ orthogonal to the top direction
  const double d2 = oracle::explicit_distance(em, samples, sv({0, 1}), 2);
  CHECK(d2 <= 1e-6);  // rank 2 spans the plane
}

TEST_CASE("brute-force POD maximum") {
  SUBCASE("identity 2x2 columns") {
    const Matrix a = Matrix::identity(2);
    const double bf = oracle::brute_force_pod_max(a, 20000, 3);
    CHECK(bf <= 1.0 + 1e-6);
    CHECK(bf > 0.9);
  }
  SUBCASE("diag(2,1) columns: lambda1 = 4 from A A^T = diag(4,1)") {
    Matrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 1.0;
    const double bf = oracle::brute_force_pod_max(a, 20000, 4);
    CHECK(bf <= 4.0 + 1e-6);
    CHECK(oracle::pod_objective(a, {1.0, 0.0}) == doctest::Approx(4.0));
  }
  SUBCASE("random rectangular data never beats lambda1") {
    SplitMix64 rng(12);
    for (int rep = 0; rep < 5; ++rep) {
      const int m = 3, n = 5;
      Matrix a(m, n);
      for (auto& v : a.a) v = rng.uniform(-1.0, 1.0);
      Matrix aat(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += a(i, k) * a(j, k);
          aat(i, j) = s;
        }
      const auto e = sym_eigen(aat);
      const double bf = oracle::brute_force_pod_max(a, 20000, 100 + rep);
      CHECK(bf <= e.values[0] + 1e-6);

      std::vector<double> v1(m);
      for (int i = 0; i < m; ++i) v1[i] = e.vectors(i, 0);
      CHECK(std::abs(oracle::pod_objective(a, v1) - e.values[0]) <= 1e-10);
    }
  }
}
