#pragma once

#include <vector>

#include "kpod/matrix.hpp"

namespace kpod {

/// Full spectrum of a symmetric matrix. values are sorted non-increasing;
/// column i of vectors is the unit-norm eigenvector for values[i].
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
};

/// How many leading modes a subspace keeps: eigenvalues below
/// rank_floor_ratio * lambda1 are dropped outright, then the smallest p with
/// cumulative energy >= energy_threshold is retained.
struct TruncationPolicy {
  double energy_threshold = 0.999;
  double rank_floor_ratio = 1e-10;

  void validate() const;
};

/// Cyclic Jacobi rotations; robust and simple, used up to moderate sizes.
EigenDecomposition sym_eigen_jacobi(const Matrix& a);

/// Householder tridiagonalization followed by implicit-shift QL; used for
/// large matrices where Jacobi's O(n^3) sweeps become too slow.
EigenDecomposition sym_eigen_tridiagonal(const Matrix& a);

/// Dispatching front end. Input must be symmetric (1e-12 relative);
/// eigenvalues in [-1e-8*lambda1, 0) are clamped to zero and anything more
/// negative raises numerical_error, which signals a non-PSD Gram.
EigenDecomposition sym_eigen(const Matrix& a);

/// Retained mode count under the policy. Throws degenerate_error when the
/// whole spectrum is zero.
int truncate(const EigenDecomposition& d, const TruncationPolicy& policy);

}  // namespace kpod
