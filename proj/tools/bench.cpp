// Benchmark: OpenMP kernels vs their serial reference implementations, plus
// the two eigensolver routes. Also asserts the parallel results match the
// serial ones bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kpod/classifier.hpp"
#include "kpod/data.hpp"
#include "kpod/rng.hpp"

using namespace kpod;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<Sample> blob_dataset(int classes, int per_class, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Sample> out;
  for (int c = 0; c < classes; ++c) {
    const double cx = 4.0 * c;
    for (int i = 0; i < per_class; ++i) {
      Sample s;
      s.label = std::to_string(c + 1);
      s.features = {{1, cx + rng.gaussian()}, {2, rng.gaussian()}};
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  int max_n = 512;
  if (argc > 1) max_n = std::atoi(argv[1]);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif

  KernelSpec ks;
  ks.sigma = 1.2;

  std::printf("\n-- gram assembly (rbf, 2d points) --\n");
  std::printf("%8s %12s %12s %9s %s\n", "n", "omp [s]", "serial [s]", "speedup", "bit-equal");
  for (int n = 128; n <= max_n; n *= 2) {
    SplitMix64 rng(n);
    std::vector<SparseVec> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back(SparseVec{{1, rng.gaussian()}, {2, rng.gaussian()}});

    double t0 = now_seconds();
    const GramMatrix gp = gram(ks, pts);
    double t1 = now_seconds();
    const GramMatrix gs = gram_serial(ks, pts);
    double t2 = now_seconds();

    const bool equal = gp.entries.size() == gs.entries.size() &&
                       std::memcmp(gp.entries.data(), gs.entries.data(),
                                   gp.entries.size() * sizeof(double)) == 0;
    std::printf("%8d %12.4f %12.4f %8.2fx %s\n", n, t1 - t0, t2 - t1,
                (t1 - t0) > 0 ? (t2 - t1) / (t1 - t0) : 0.0, equal ? "yes" : "NO");
  }

  std::printf("\n-- eigensolvers (random PSD) --\n");
  std::printf("%8s %12s %12s %14s\n", "n", "jacobi [s]", "tridiag [s]", "max |dlambda|");
  for (int n = 64; n <= max_n; n *= 2) {
    SplitMix64 rng(n);
    Matrix b(n, n);
    for (auto& v : b.a) v = rng.uniform(-1.0, 1.0);
    Matrix s(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += b(i, k) * b(j, k);
        s(i, j) = acc;
        s(j, i) = acc;
      }

    double t0 = now_seconds();
    const EigenDecomposition ej = sym_eigen_jacobi(s);
    double t1 = now_seconds();
    const EigenDecomposition et = sym_eigen_tridiagonal(s);
    double t2 = now_seconds();

    double dl = 0.0;
    for (int i = 0; i < n; ++i) dl = std::max(dl, std::abs(ej.values[i] - et.values[i]));
    std::printf("%8d %12.4f %12.4f %14.3e\n", n, t1 - t0, t2 - t1, dl);
  }

  std::printf("\n-- batch prediction (4 classes x 256 samples) --\n");
  {
    const std::vector<Sample> trainset = blob_dataset(4, 256, 11);
    TrainConfig tc;
    tc.kernel = ks;
    const Classifier c = train(trainset, tc);

    SplitMix64 rng(99);
    std::vector<SparseVec> queries;
    for (int i = 0; i < 2000; ++i)
      queries.push_back(SparseVec{{1, rng.uniform(-2.0, 14.0)}, {2, rng.uniform(-3.0, 3.0)}});

    double t0 = now_seconds();
    const auto pp = predict_batch(c, queries);
    double t1 = now_seconds();
    const auto sp = predict_batch_serial(c, queries);
    double t2 = now_seconds();

    bool equal = true;
    for (std::size_t i = 0; i < queries.size(); ++i)
      if (pp[i].label != sp[i].label || pp[i].class_distances != sp[i].class_distances)
        equal = false;
    std::printf("%8zu %12.4f %12.4f %8.2fx %s\n", queries.size(), t1 - t0, t2 - t1,
                (t1 - t0) > 0 ? (t2 - t1) / (t1 - t0) : 0.0, equal ? "yes" : "NO");
  }
  return 0;
}
