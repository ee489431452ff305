#include "geodesica/mds.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace geodesica::mds {
namespace {

void check_square_symmetric_hollow(const Matrix& A) {
  if (A.rows() != A.cols()) throw Error("shape_mismatch", "tau needs a square matrix");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (A(i, i) != 0.0) throw Error("invalid_dissimilarity", "tau input is not hollow");
    for (Eigen::Index j = i + 1; j < A.cols(); ++j) {
      if (std::abs(A(i, j) - A(j, i)) > 1e-12 * scale) {
        throw Error("invalid_dissimilarity", "tau input is not symmetric");
      }
      if (A(i, j) < 0.0) throw Error("invalid_dissimilarity", "tau input has negative entries");
    }
  }
}

void require_finite(const DissimilarityMatrix& delta) {
  if (!delta.all_finite()) {
    throw Error("infinite_dissimilarity", "cannot embed a dissimilarity matrix with infinite entries");
  }
}

void require_same_size(const Configuration& Z, const DissimilarityMatrix& delta) {
  if (Z.size() != delta.size()) throw Error("shape_mismatch", "configuration and dissimilarity sizes differ");
}

void fix_column_signs(Matrix& Z) {
  for (Eigen::Index c = 0; c < Z.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < Z.rows(); ++r) {
      if (std::abs(Z(r, c)) > best) {
        best = std::abs(Z(r, c));
        arg = r;
      }
    }
    if (Z.rows() > 0 && Z(arg, c) < 0.0) Z.col(c) *= -1.0;
  }
}

bool weights_connected(const Matrix& W) {
  const auto n = W.rows();
  if (n <= 1) return true;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> stack{0};
  seen[0] = true;
  Eigen::Index reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (Eigen::Index v = 0; v < n; ++v) {
      if (!seen[static_cast<std::size_t>(v)] && W(u, v) > 0.0) {
        seen[static_cast<std::size_t>(v)] = true;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

Matrix checked_weights(const Matrix& W, Eigen::Index n) {
  if (W.size() == 0) {
    Matrix unit = Matrix::Ones(n, n);
    unit.diagonal().setZero();
    return unit;
  }
  if (W.rows() != n || W.cols() != n) throw Error("shape_mismatch", "weight matrix size differs from dissimilarities");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(W(i, j) >= 0.0) || W(i, j) != W(j, i)) {
        throw Error("invalid_weights", "weights must be symmetric and nonnegative");
      }
    }
  }
  Matrix out = W;
  out.diagonal().setZero();
  return out;
}

}  // namespace

GramLikeMatrix tau(const Matrix& A) {
  check_square_symmetric_hollow(A);
  const Eigen::Index n = A.rows();
  // -1/2 P A P computed as double centering of A.
  const Vector row_mean = A.rowwise().mean();
  const Vector col_mean = A.colwise().mean().transpose();
  const double grand = n > 0 ? A.mean() : 0.0;
  Matrix B(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      B(i, j) = -0.5 * (A(i, j) - row_mean(i) - col_mean(j) + grand);
    }
  }
  B = 0.5 * (B + B.transpose()).eval();
  GramLikeMatrix out{std::move(B), {}};
  out.spectrum = jacobi_eigen(out.B);
  return out;
}

EdmClassification classify_spectrum(const Vector& eigenvalues, double rel_tol) {
  EdmClassification out;
  out.eigenvalues = eigenvalues;
  const double max_abs = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  out.tolerance = rel_tol * max_abs;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double v = eigenvalues(i);
    if (v > out.tolerance) {
      ++out.n_pos;
      out.pos_variation += v;
    } else if (v < -out.tolerance) {
      ++out.n_neg;
      out.neg_variation += -v;
    } else {
      ++out.n_zero;
    }
  }
  out.is_edm = out.n_neg == 0;
  out.embedding_dim = out.is_edm ? out.n_pos : 0;
  return out;
}

EdmClassification classify_edm(const DissimilarityMatrix& delta, double rel_tol) {
  require_finite(delta);
  return classify_spectrum(tau(delta.squared()).spectrum.values, rel_tol);
}

CmdsResult cmds_full(const DissimilarityMatrix& delta, std::size_t dim) {
  require_finite(delta);
  if (dim < 1) throw Error("invalid_argument", "target dimension must be at least 1");
  if (dim > delta.size()) throw Error("invalid_argument", "target dimension exceeds the number of points");
  CmdsResult out{{}, tau(delta.squared())};
  const auto n = static_cast<Eigen::Index>(delta.size());
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix Z(n, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const double lambda = std::max(out.gram.spectrum.values(c), 0.0);
    Z.col(c) = std::sqrt(lambda) * out.gram.spectrum.vectors.col(c);
  }
  fix_column_signs(Z);
  out.config.coords = std::move(Z);
  return out;
}

Configuration cmds(const DissimilarityMatrix& delta, std::size_t dim) { return cmds_full(delta, dim).config; }

PsdTruncation low_rank_psd_truncation(const Matrix& B, std::size_t dim) {
  if (B.rows() != B.cols()) throw Error("shape_mismatch", "truncation needs a square matrix");
  const auto eig = jacobi_eigen(B);
  const auto n = B.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(n, static_cast<Eigen::Index>(dim)); ++k) {
    const double lambda = std::max(eig.values(k), 0.0);
    if (lambda > 0.0) out.noalias() += lambda * eig.vectors.col(k) * eig.vectors.col(k).transpose();
  }
  const double error = (out - B).norm();
  return {std::move(out), error};
}

double raw_stress(const Configuration& Z, const DissimilarityMatrix& delta, const Matrix& weights) {
  require_same_size(Z, delta);
  const auto n = static_cast<Eigen::Index>(delta.size());
  const bool unit = weights.size() == 0;
  if (!unit && (weights.rows() != n || weights.cols() != n)) {
    throw Error("shape_mismatch", "weight matrix size differs from dissimilarities");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = unit ? 1.0 : weights(i, j);
      if (w == 0.0) continue;
      const double r = (Z.coords.row(i) - Z.coords.row(j)).norm() - delta.matrix()(i, j);
      sum += w * r * r;
    }
  }
  return sum;
}

double raw_stress(const Configuration& Z, const DissimilarityMatrix& delta) { return raw_stress(Z, delta, Matrix()); }

SmacofResult smacof(const DissimilarityMatrix& delta, const Configuration& init, const StressParams& params) {
  require_finite(delta);
  require_same_size(init, delta);
  if (init.dim() < 1) throw Error("invalid_argument", "initial configuration needs dimension >= 1");
  const auto n = static_cast<Eigen::Index>(delta.size());
  const bool unit = params.weights.size() == 0;
  const Matrix W = checked_weights(params.weights, n);
  if (!weights_connected(W)) {
    throw Error("disconnected_weights", "zero weights split the points into disconnected groups");
  }

  // Moore-Penrose inverse of V = sum w_ij (e_i - e_j)(e_i - e_j)^t; with unit
  // weights it is (I - ee^t/n) / n, applied implicitly below.
  Matrix v_plus;
  if (!unit && n > 0) {
    Matrix V = -W;
    V.diagonal() = W.rowwise().sum();
    const Matrix ones = Matrix::Constant(n, n, 1.0);
    v_plus = (V + ones).ldlt().solve(Matrix::Identity(n, n)) - ones / static_cast<double>(n * n);
  }

  const Matrix& D = delta.matrix();
  SmacofResult out;
  out.config = init;
  double current = raw_stress(init, delta, params.weights);
  out.trace.push_back(current);

  // Stress evaluated at round-off level fluctuates by about eps^2 sum w delta^2.
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) scale += W(i, j) * D(i, j) * D(i, j);
  const double eps = std::numeric_limits<double>::epsilon();
  const double noise_floor = 64.0 * eps * eps * scale;

  Matrix B(n, n);
  for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
    const Matrix& Z = out.config.coords;
    for (Eigen::Index i = 0; i < n; ++i) {
      double diag = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double dist = (Z.row(i) - Z.row(j)).norm();
        // Coincident points contribute nothing this step.
        const double b = dist > 0.0 ? -W(i, j) * D(i, j) / dist : 0.0;
        B(i, j) = b;
        diag -= b;
      }
      B(i, i) = diag;
    }
    Matrix next = B * Z;
    if (unit) {
      next /= static_cast<double>(n);
      next.rowwise() -= next.colwise().mean();
    } else {
      next = v_plus * next;
    }
    out.config.coords = std::move(next);
    const double updated = raw_stress(out.config, delta, params.weights);
    out.trace.push_back(updated);
    ++out.iterations;
    if (updated > current * (1.0 + 1e-12) + noise_floor) out.monotone = false;
    const bool converged = current == 0.0 || (current - updated) < params.rel_tol * current;
    current = updated;
    if (converged) break;
  }
  return out;
}

double procrustes_distance(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw Error("shape_mismatch", "Procrustes needs configurations of equal shape");
  }
  if (A.rows() == 0) return 0.0;
  const Matrix Ac = A.rowwise() - A.colwise().mean();
  const Matrix Bc = B.rowwise() - B.colwise().mean();
  const Eigen::JacobiSVD<Matrix> svd(Bc.transpose() * Ac, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix R = svd.matrixU() * svd.matrixV().transpose();
  return (Ac - Bc * R).norm();
}

std::string spectrum_report_json(const EdmClassification& edm, std::size_t dim) {
  nlohmann::ordered_json j;
  j["eigenvalues"] = std::vector<double>(edm.eigenvalues.data(), edm.eigenvalues.data() + edm.eigenvalues.size());
  j["n_pos"] = edm.n_pos;
  j["n_zero"] = edm.n_zero;
  j["n_neg"] = edm.n_neg;
  j["pos_variation"] = edm.pos_variation;
  j["neg_variation"] = edm.neg_variation;
  j["is_edm"] = edm.is_edm;
  j["embedding_dim"] = edm.embedding_dim;
  j["tolerance"] = edm.tolerance;
  double top = 0.0;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(edm.eigenvalues.size(), static_cast<Eigen::Index>(dim)); ++k) {
    top += std::max(edm.eigenvalues(k), 0.0);
  }
  j["dim"] = dim;
  j["top_variation"] = top;
  j["explained_of_positive"] = edm.pos_variation > 0.0 ? top / edm.pos_variation : 0.0;
  const double absolute = edm.pos_variation + edm.neg_variation;
  j["explained_of_absolute"] = absolute > 0.0 ? top / absolute : 0.0;
  return j.dump(2) + "\n";
}

}  // namespace geodesica::mds
