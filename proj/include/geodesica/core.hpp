#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace geodesica {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Every failure raised by the library carries a short machine-readable code
// ("invalid_argument", "shape_mismatch", "disconnected_graph", ...) that the
// command line surface forwards in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct RandomSeed {
  std::uint64_t value = 0;
};

// Independent stream `stream` derived from a base seed (splitmix64 mixing).
RandomSeed derive_seed(RandomSeed base, std::uint64_t stream);

// Points are stored one per row; the column count is the ambient dimension.
struct PointCloud {
  Matrix points;
  std::vector<int> labels;  // optional, empty or one per point

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t ambient_dim() const { return static_cast<std::size_t>(points.cols()); }
  Eigen::RowVectorXd point(std::size_t i) const { return points.row(static_cast<Eigen::Index>(i)); }
};

// n x n symmetric, hollow, nonnegative dissimilarities. Finite unless built
// with allow_infinite, which graph metrics use for cross-component pairs.
class DissimilarityMatrix {
 public:
  DissimilarityMatrix() = default;

  static DissimilarityMatrix from_matrix(Matrix values, bool allow_infinite = false);
  // Skips validation; caller guarantees the invariants.
  static DissimilarityMatrix trusted(Matrix values);

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Matrix& matrix() const { return values_; }
  bool all_finite() const;
  Matrix squared() const { return values_.array().square().matrix(); }

 private:
  explicit DissimilarityMatrix(Matrix values) : values_(std::move(values)) {}
  Matrix values_;
};

struct Configuration {
  Matrix coords;  // n x d

  std::size_t size() const { return static_cast<std::size_t>(coords.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(coords.cols()); }
};

// Euclidean interpoint distances of the rows of X.
Matrix pairwise_distances(const Matrix& X);

// mt19937_64 output is fixed by the standard but the <random> distributions
// are not, so draws are built from the raw engine bits to keep samples
// bit-identical across standard library vendors.
class Rng {
 public:
  explicit Rng(RandomSeed seed) : engine_(seed.value) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace geodesica
