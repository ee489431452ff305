#include "geodesica/core.hpp"

#include <algorithm>
#include <cmath>

namespace geodesica {

RandomSeed derive_seed(RandomSeed base, std::uint64_t stream) {
  std::uint64_t z = base.value + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return RandomSeed{z ^ (z >> 31)};
}

DissimilarityMatrix DissimilarityMatrix::from_matrix(Matrix values, bool allow_infinite) {
  if (values.rows() != values.cols()) {
    throw Error("shape_mismatch", "dissimilarity matrix must be square");
  }
  const Eigen::Index n = values.rows();
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = values(i, j);
      if (std::isnan(v)) throw Error("invalid_dissimilarity", "dissimilarity matrix contains NaN");
      if (std::isinf(v) && !allow_infinite) {
        throw Error("infinite_dissimilarity",
                    "dissimilarity matrix has infinite entries (disconnected graph?)");
      }
      if (v < 0.0) throw Error("invalid_dissimilarity", "dissimilarity matrix has negative entries");
      if (std::isfinite(v)) scale = std::max(scale, v);
    }
    if (values(i, i) != 0.0) throw Error("invalid_dissimilarity", "dissimilarity matrix is not hollow");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = values(i, j), b = values(j, i);
      if (std::isinf(a) || std::isinf(b)) {
        if (a != b) throw Error("invalid_dissimilarity", "dissimilarity matrix is not symmetric");
        continue;
      }
      if (std::abs(a - b) > 1e-12 * scale) {
        throw Error("invalid_dissimilarity", "dissimilarity matrix is not symmetric");
      }
    }
  }
  return DissimilarityMatrix(std::move(values));
}

DissimilarityMatrix DissimilarityMatrix::trusted(Matrix values) {
  return DissimilarityMatrix(std::move(values));
}

bool DissimilarityMatrix::all_finite() const { return values_.allFinite(); }

Matrix pairwise_distances(const Matrix& X) {
  const Eigen::Index n = X.rows();
  Matrix D = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (X.row(i) - X.row(j)).norm();
      D(i, j) = d;
      D(j, i) = d;
    }
  }
  return D;
}

double Rng::normal() {
  // Box-Muller; the second variate is discarded to keep the stream simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace geodesica
