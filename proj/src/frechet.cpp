#include "geodesica/frechet.hpp"

#include "geodesica/parallel.hpp"

#include <json.hpp>

#include <vector>

namespace geodesica::frechet {

std::string to_string(Method method) {
  return method == Method::GeodesicBruteForce ? "geodesic-brute-force" : "embedded-average";
}

double frechet_objective(const DissimilarityMatrix& delta, std::size_t j) {
  const auto n = delta.size();
  if (j >= n) throw Error("invalid_argument", "candidate index out of range");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += delta(i, j) * delta(i, j);
  return sum / static_cast<double>(n);
}

FrechetResult sample_frechet_mean(const DissimilarityMatrix& delta) {
  const auto n = delta.size();
  if (n == 0) throw Error("invalid_argument", "Frechet mean of an empty sample");
  std::vector<double> objective(n);
  parallel_for(n, [&](std::size_t j) { objective[j] = frechet_objective(delta, j); });
  FrechetResult out{Method::GeodesicBruteForce, 0, objective[0]};
  for (std::size_t j = 1; j < n; ++j) {
    if (objective[j] < out.objective) {
      out.index = j;
      out.objective = objective[j];
    }
  }
  return out;
}

FrechetResult embedded_frechet_mean(const Configuration& Z, const DissimilarityMatrix& delta) {
  if (Z.size() != delta.size()) throw Error("shape_mismatch", "configuration and dissimilarity sizes differ");
  if (Z.size() == 0) throw Error("invalid_argument", "Frechet mean of an empty sample");
  const Eigen::RowVectorXd mean = Z.coords.colwise().mean();
  std::size_t best = 0;
  double best_dist = kInfinity;
  for (std::size_t i = 0; i < Z.size(); ++i) {
    const double d = (Z.coords.row(static_cast<Eigen::Index>(i)) - mean).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return {Method::EmbeddedAverage, best, frechet_objective(delta, best)};
}

std::string result_json(const FrechetResult& result) {
  nlohmann::ordered_json j;
  j["method"] = to_string(result.method);
  j["index"] = result.index;
  j["objective"] = result.objective;
  return j.dump(2) + "\n";
}

}  // namespace geodesica::frechet
