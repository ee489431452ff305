#pragma once

#include "geodesica/core.hpp"

#include <string>

namespace geodesica::frechet {

enum class Method { GeodesicBruteForce, EmbeddedAverage };

std::string to_string(Method method);

struct FrechetResult {
  Method method = Method::GeodesicBruteForce;
  std::size_t index = 0;   // 0-based sample index
  double objective = 0.0;  // sum_i delta(m, x_i)^2 / n
};

// Sample objective of candidate j.
double frechet_objective(const DissimilarityMatrix& delta, std::size_t j);

// Exact minimizer over the sample points; lowest index on ties.
FrechetResult sample_frechet_mean(const DissimilarityMatrix& delta);

// Sample point nearest the coordinate average of Z, scored by delta.
FrechetResult embedded_frechet_mean(const Configuration& Z, const DissimilarityMatrix& delta);

// {"method", "index", "objective"}
std::string result_json(const FrechetResult& result);

}  // namespace geodesica::frechet
