#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace kpod {

/// Dense row-major matrix; just enough linear algebra for this project.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * std::size_t(c), 0.0) {}
  Matrix(int r, int c, std::vector<double> data) : rows(r), cols(c), a(std::move(data)) {}

  double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
  double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

  double* row(int i) { return a.data() + std::size_t(i) * cols; }
  const double* row(int i) const { return a.data() + std::size_t(i) * cols; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

}  // namespace kpod
