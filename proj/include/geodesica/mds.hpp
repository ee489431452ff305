#pragma once

#include "geodesica/core.hpp"
#include "geodesica/eigen_jacobi.hpp"

#include <string>
#include <vector>

namespace geodesica::mds {

// tau(A) = -1/2 P A P with P = I - ee^t/n, plus its full spectrum.
struct GramLikeMatrix {
  Matrix B;
  SymmetricEigen spectrum;
};

GramLikeMatrix tau(const Matrix& squared_dissimilarities);

inline constexpr double kZeroEigenvalueTol = 1e-8;

struct EdmClassification {
  bool is_edm = false;             // tau(Delta_2) is positive semidefinite under tolerance
  std::size_t embedding_dim = 0;   // rank(tau(Delta_2)) when is_edm
  std::size_t n_pos = 0;
  std::size_t n_zero = 0;
  std::size_t n_neg = 0;
  double pos_variation = 0.0;      // sum of positive eigenvalues
  double neg_variation = 0.0;      // sum of |negative eigenvalues|
  double tolerance = 0.0;          // absolute threshold rel_tol * max |lambda|
  Vector eigenvalues;              // descending
};

EdmClassification classify_spectrum(const Vector& eigenvalues, double rel_tol = kZeroEigenvalueTol);
EdmClassification classify_edm(const DissimilarityMatrix& delta, double rel_tol = kZeroEigenvalueTol);

struct CmdsResult {
  Configuration config;
  GramLikeMatrix gram;
};

// Classical MDS: Z = [sigma_1 u_1 | ... | sigma_d u_d] with sigma_i^2 = max(lambda_i, 0).
// Columns follow descending eigenvalues; each column is flipped so that its
// largest-magnitude entry is positive.
CmdsResult cmds_full(const DissimilarityMatrix& delta, std::size_t dim);
Configuration cmds(const DissimilarityMatrix& delta, std::size_t dim);

struct PsdTruncation {
  Matrix truncated;
  double frobenius_error = 0.0;
};

// Best rank <= d positive semidefinite approximation of a symmetric matrix.
PsdTruncation low_rank_psd_truncation(const Matrix& B, std::size_t dim);

// Empty weights mean w_ij = 1 for every pair.
struct StressParams {
  Matrix weights;
  std::size_t max_iters = 20;
  double rel_tol = 1e-6;
};

// sigma(Z) = sum_{i<j} w_ij (|z_i - z_j| - delta_ij)^2
double raw_stress(const Configuration& Z, const DissimilarityMatrix& delta);
double raw_stress(const Configuration& Z, const DissimilarityMatrix& delta, const Matrix& weights);

struct SmacofResult {
  Configuration config;
  std::vector<double> trace;  // trace[0] is the initial stress, one entry per Guttman step after
  std::size_t iterations = 0;
  bool monotone = true;       // no increase beyond 1e-12 relative slack
};

SmacofResult smacof(const DissimilarityMatrix& delta, const Configuration& init, const StressParams& params = {});

// Root-sum-square mismatch after optimal translation and orthogonal
// (rotation or reflection) alignment of B onto A.
double procrustes_distance(const Matrix& A, const Matrix& B);

// {"eigenvalues", "n_pos", "n_zero", "n_neg", "pos_variation", "neg_variation", ...}
// with the fraction explained by the top `dim` eigenvalues against both the
// positive and the absolute total variation.
std::string spectrum_report_json(const EdmClassification& edm, std::size_t dim);

}  // namespace geodesica::mds
