#pragma once

#include "geodesica/core.hpp"

namespace geodesica::mds {

// Eigenvalues sorted descending, matching orthonormal eigenvectors as columns.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

// Cyclic Jacobi with a fixed row-major (p, q) sweep order. Sweeps stop once
// the off-diagonal Frobenius norm falls below rel_tol * ||B||_F.
SymmetricEigen jacobi_eigen(const Matrix& B, double rel_tol = 1e-12, int max_sweeps = 100);

}  // namespace geodesica::mds
