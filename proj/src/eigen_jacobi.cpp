#include "geodesica/eigen_jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace geodesica::mds {
namespace {

constexpr Eigen::Index kBlock = 32;

double off_diagonal_norm(const Matrix& A) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      if (i != j) sum += A(i, j) * A(i, j);
    }
  }
  return std::sqrt(sum);
}

// Rotation in the (p, q) plane annihilating A(p, q), applied to columns p and
// q of A and V only. The mirrored row entries are written by the caller.
void rotate_columns(Matrix& A, Matrix& V, Eigen::Index p, Eigen::Index q) {
  double* __restrict colp = A.col(p).data();
  double* __restrict colq = A.col(q).data();
  const double apq = colp[q];
  const double app = colp[p];
  const double aqq = colq[q];
  const double theta = (aqq - app) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Eigen::Index n = A.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = colp[k];
    const double akq = colq[k];
    colp[k] = c * akp - s * akq;
    colq[k] = s * akp + c * akq;
  }
  colp[p] = app - t * apq;
  colq[q] = aqq + t * apq;
  colp[q] = 0.0;
  colq[p] = 0.0;

  double* __restrict vp = V.col(p).data();
  double* __restrict vq = V.col(q).data();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = vp[k];
    const double b = vq[k];
    vp[k] = c * a - s * b;
    vq[k] = s * a + c * b;
  }
}

// One row-major sweep. Column p always holds current values. Row entries
// mirrored from rotated columns are written once per block of q's, and a
// column is refreshed from its rotated block mates just before it is read, so
// every rotation sees the same operands as a fully symmetric update would.
void sweep(Matrix& A, Matrix& V, bool zero_negligible, double skip_below) {
  const Eigen::Index n = A.rows();
  std::vector<Eigen::Index> rotated;
  rotated.reserve(kBlock);
  for (Eigen::Index p = 0; p < n - 1; ++p) {
    double* colp = A.col(p).data();
    for (Eigen::Index q0 = p + 1; q0 < n; q0 += kBlock) {
      const Eigen::Index q1 = std::min(n, q0 + kBlock);
      rotated.clear();
      for (Eigen::Index q = q0; q < q1; ++q) {
        double* colq = A.col(q).data();
        for (auto r : rotated) colq[r] = A(q, r);
        const double apq = std::abs(colp[q]);
        if (apq == 0.0) continue;
        const double g = 100.0 * apq;
        if (zero_negligible && std::abs(colp[p]) + g == std::abs(colp[p]) && std::abs(colq[q]) + g == std::abs(colq[q])) {
          colp[q] = 0.0;
          colq[p] = 0.0;
        } else if (apq > skip_below) {
          rotate_columns(A, V, p, q);
          rotated.push_back(q);
        }
      }
      if (rotated.empty()) continue;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == p) continue;
        double* colk = A.col(k).data();
        colk[p] = colp[k];
        for (auto r : rotated) {
          if (r != k) colk[r] = A(k, r);
        }
      }
    }
  }
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& B, double rel_tol, int max_sweeps) {
  if (B.rows() != B.cols()) throw Error("shape_mismatch", "eigendecomposition needs a square matrix");
  const Eigen::Index n = B.rows();
  Matrix A = 0.5 * (B + B.transpose());
  Matrix V = Matrix::Identity(n, n);
  const double scale = A.norm();
  const double threshold = rel_tol * scale;

  int sweeps = 0;
  while (scale > 0.0) {
    const double off = off_diagonal_norm(A);
    if (off < threshold) break;
    if (sweeps++ >= max_sweeps) {
      throw Error("no_convergence", "Jacobi eigensolver did not converge in " + std::to_string(max_sweeps) + " sweeps");
    }
    // Early sweeps skip small entries; later sweeps zero entries that are
    // already below rounding relative to both diagonal entries.
    const double skip_below = sweeps <= 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    sweep(A, V, sweeps > 4, skip_below);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return A(a, a) > A(b, b); });
  SymmetricEigen result{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    result.values(k) = A(src, src);
    result.vectors.col(k) = V.col(src);
  }
  return result;
}

}  // namespace geodesica::mds
