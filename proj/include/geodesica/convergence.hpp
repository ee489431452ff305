#pragma once

#include "geodesica/core.hpp"
#include "geodesica/manifolds.hpp"

#include <optional>
#include <string>
#include <vector>

namespace geodesica::convergence {

// Parameters of the epsilon-graph sandwich bound. r0 is the minimum radius of
// curvature, s0 the minimum branch separation; +inf marks "no constraint".
struct BoundContext {
  double r0 = kInfinity;
  double s0 = kInfinity;
  bool s0_estimated = false;     // s0 came from pair sampling (an upper estimate)
  bool corner_caveat = false;    // flat pieces joined at corners: curvature not modeled by r0
  double epsilon = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double diameter = kInfinity;   // sup d_M

  bool eps_lt_s0() const { return epsilon < s0; }
  // epsilon <= (2 / pi) r0 sqrt(24 lambda)
  bool eps_curvature_ok() const;
  // delta <= lambda epsilon / 4
  bool delta_ok() const { return delta <= lambda * epsilon / 4.0; }
  bool hypotheses_hold() const { return eps_lt_s0() && eps_curvature_ok() && delta_ok() && lambda > 0.0 && lambda < 1.0; }
};

// Largest epsilon the curvature hypothesis allows: (2 / pi) r0 sqrt(24 lambda).
double max_epsilon_for_curvature(double r0, double lambda);

// Curvature of the Archimedean spiral beta t (cos t, sin t):
// kappa(t) = (t^2 + 2) / (beta (t^2 + 1)^{3/2}).
double spiral_curvature(double beta, double t);

// Closed-form r0 (and s0 / diameter where known). Spiral-based kinds get r0
// by dense evaluation of the curvature and s0 by estimate_branch_separation
// with the given probe budget.
BoundContext analytic_bound_params(const manifolds::ManifoldOracle& oracle, std::size_t s0_probe_pairs = 20000,
                                   RandomSeed seed = {1});

// Smallest chord |x - y| over sampled pairs with d_M(x, y) > pi r0; an upper
// estimate of s0. +inf when no sampled pair is that far apart.
double estimate_branch_separation(const manifolds::ManifoldOracle& oracle, std::size_t probe_pairs, RandomSeed seed,
                                  std::optional<double> pi_r0_cap = std::nullopt);

struct MinLengthCheck {
  std::size_t trials = 0;
  double min_margin = kInfinity;     // min over arcs of chord - 2 r0 sin(l / 2 r0)
  double max_abs_margin = 0.0;
};

// Samples unit-speed geodesic arcs of length l <= pi r0 on sphere or circle
// oracles and compares their chords to 2 r0 sin(l / (2 r0)).
MinLengthCheck check_min_length_lemma(const manifolds::ManifoldOracle& oracle, std::size_t trials, RandomSeed seed);

struct DeltaSamplingCheck {
  bool satisfied = true;
  double worst_gap = 0.0;  // max over probes of min_i d_M(probe, x_i)
  std::size_t probes = 0;
};

DeltaSamplingCheck check_delta_sampling(const manifolds::ManifoldOracle& oracle, const PointCloud& cloud,
                                        double delta, std::size_t probes, RandomSeed seed);

// max(0, 1 - k (1 - b)^n)
double sampling_lemma_bound(std::size_t k, double b, std::size_t n);

// Centers of a greedy farthest-point net: every reference point ends up within
// `radius` of a center. Deterministic for a fixed seed.
PointCloud greedy_net(const manifolds::ManifoldOracle& oracle, double radius, std::size_t reference_size,
                      RandomSeed seed);

// A greedy delta/2-net with Monte Carlo estimates of each ball's mass.
struct SamplingCover {
  PointCloud centers;
  double ball_radius = 0.0;
  std::vector<double> masses;
  double b = 0.0;  // min mass

  std::size_t k() const { return centers.size(); }
};

SamplingCover build_sampling_cover(const manifolds::ManifoldOracle& oracle, double delta, RandomSeed seed,
                                   std::size_t reference_size = 4000, std::size_t mass_draws = 200000);

struct SamplingLemmaCheck {
  std::size_t k = 0;
  double ball_radius = 0.0;
  double b = 0.0;
  bool mass_exceeds_radius = false;  // b > ball_radius; reported, never asserted
  std::size_t n = 0;
  std::size_t repetitions = 0;
  double bound = 0.0;           // sampling_lemma_bound(k, b, n)
  double frequency = 0.0;       // fraction of repetitions where every ball was hit
  double standard_error = 0.0;

  bool passes() const { return frequency >= bound - 3.0 * standard_error; }
};

// Empirical frequency, over independent draws of n iid points, of the event
// that every ball of the cover contains a sample point.
SamplingLemmaCheck check_sampling_lemma(const manifolds::ManifoldOracle& oracle, const SamplingCover& cover,
                                        std::size_t n, std::size_t repetitions, RandomSeed seed);

struct SandwichAudit {
  bool eps_lt_s0 = false;
  bool eps_curvature_ok = false;
  bool delta_ok = false;
  bool certified = false;  // all hypotheses hold and r0 models the geometry
  std::size_t pairs = 0;
  std::size_t violations_low = 0;   // metric < (1 - lambda) d_M
  std::size_t violations_high = 0;  // metric > (1 + lambda) d_M
  double worst_ratio_low = kInfinity;  // min metric / d_M
  double worst_ratio_high = 0.0;       // max metric / d_M
};

// Compares a graph metric (d_G or d_S) with (1 +- lambda) d_M over all pairs i < j.
SandwichAudit audit_sandwich(const manifolds::ManifoldOracle& oracle, const PointCloud& cloud, const Matrix& metric,
                             const BoundContext& context);

std::string audit_report_json(const SandwichAudit& audit);

}  // namespace geodesica::convergence
