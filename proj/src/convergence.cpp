#include "geodesica/convergence.hpp"

#include "geodesica/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace geodesica::convergence {
namespace {

using manifolds::ManifoldKind;
using manifolds::ManifoldOracle;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Dense evaluation of 1 / kappa over [t_min, t_max].
double spiral_min_radius(double beta, double t_min, double t_max) {
  constexpr int kSteps = 100000;
  double best = kInfinity;
  for (int k = 0; k <= kSteps; ++k) {
    const double t = t_min + (t_max - t_min) * static_cast<double>(k) / kSteps;
    best = std::min(best, 1.0 / spiral_curvature(beta, t));
  }
  return best;
}

double minimum_radius_of_curvature(const ManifoldOracle& oracle) {
  return std::visit(overloaded{
                        [](const manifolds::RectangleCurve&) { return kInfinity; },
                        [](const manifolds::CircleCurve& c) { return c.radius; },
                        [](const manifolds::RectangularAnnulus&) { return kInfinity; },
                        [](const manifolds::SphereCap&) { return 1.0; },
                        [](const manifolds::Spiral& s) { return spiral_min_radius(s.beta, s.t_min, s.t_max); },
                        [](const manifolds::SwissRoll& r) { return spiral_min_radius(r.beta, r.s_min, r.s_max); },
                    },
                    oracle.shape());
}

double sampled_diameter(const ManifoldOracle& oracle, std::size_t pairs, RandomSeed seed) {
  const auto cloud = oracle.sample(2 * pairs, seed);
  double best = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) best = std::max(best, oracle.distance(cloud.point(2 * k), cloud.point(2 * k + 1)));
  return best;
}

Eigen::Vector3d random_unit_tangent(Rng& rng, const Eigen::Vector3d& p) {
  while (true) {
    Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
    v -= v.dot(p) * p;
    const double norm = v.norm();
    if (norm > 1e-8) return v / norm;
  }
}

}  // namespace

bool BoundContext::eps_curvature_ok() const { return epsilon <= max_epsilon_for_curvature(r0, lambda); }

double max_epsilon_for_curvature(double r0, double lambda) {
  if (std::isinf(r0)) return kInfinity;
  return (2.0 / M_PI) * r0 * std::sqrt(24.0 * lambda);
}

double spiral_curvature(double beta, double t) {
  const double t2 = t * t;
  return (t2 + 2.0) / (beta * std::pow(t2 + 1.0, 1.5));
}

BoundContext analytic_bound_params(const ManifoldOracle& oracle, std::size_t s0_probe_pairs, RandomSeed seed) {
  BoundContext ctx;
  ctx.r0 = minimum_radius_of_curvature(oracle);
  std::visit(overloaded{
                 [&](const manifolds::RectangleCurve& c) {
                   ctx.corner_caveat = true;
                   ctx.diameter = c.rect.perimeter() / 2.0;
                 },
                 [&](const manifolds::CircleCurve& c) {
                   // Every distance is at most pi * radius = pi * r0.
                   ctx.diameter = M_PI * c.radius;
                 },
                 [&](const manifolds::RectangularAnnulus&) {
                   ctx.corner_caveat = true;
                   ctx.diameter = sampled_diameter(oracle, s0_probe_pairs, seed);
                 },
                 [&](const manifolds::SphereCap& s) {
                   ctx.diameter = s.max_colatitude <= M_PI / 2 ? 2.0 * s.max_colatitude : M_PI;
                 },
                 [&](const manifolds::Spiral& s) {
                   ctx.diameter = manifolds::spiral_arclength(s.beta, s.t_max) - manifolds::spiral_arclength(s.beta, s.t_min);
                   ctx.s0 = estimate_branch_separation(oracle, s0_probe_pairs, seed, M_PI * ctx.r0);
                   ctx.s0_estimated = true;
                 },
                 [&](const manifolds::SwissRoll& r) {
                   ctx.diameter = std::hypot(
                       manifolds::spiral_arclength(r.beta, r.s_max) - manifolds::spiral_arclength(r.beta, r.s_min),
                       r.h_max - r.h_min);
                   ctx.s0 = estimate_branch_separation(oracle, s0_probe_pairs, seed, M_PI * ctx.r0);
                   ctx.s0_estimated = true;
                 },
             },
             oracle.shape());
  return ctx;
}

double estimate_branch_separation(const ManifoldOracle& oracle, std::size_t probe_pairs, RandomSeed seed,
                                  std::optional<double> pi_r0_cap) {
  const double limit = pi_r0_cap ? *pi_r0_cap : M_PI * minimum_radius_of_curvature(oracle);
  if (probe_pairs == 0 || std::isinf(limit)) return kInfinity;
  const auto cloud = oracle.sample(2 * probe_pairs, seed);
  double best = kInfinity;
  for (std::size_t k = 0; k < probe_pairs; ++k) {
    const auto a = cloud.point(2 * k);
    const auto b = cloud.point(2 * k + 1);
    if (oracle.distance(a, b) > limit) best = std::min(best, (a - b).norm());
  }
  return best;
}

MinLengthCheck check_min_length_lemma(const ManifoldOracle& oracle, std::size_t trials, RandomSeed seed) {
  MinLengthCheck out;
  out.trials = trials;
  Rng rng(seed);
  std::visit(overloaded{
                 [&](const manifolds::CircleCurve& c) {
                   const double r0 = c.radius;
                   for (std::size_t k = 0; k < trials; ++k) {
                     const double theta = rng.uniform(0.0, 2.0 * M_PI);
                     const double ell = rng.uniform(0.0, M_PI * r0);
                     auto gamma = [&](double s) {
                       return Eigen::Vector2d(c.radius * std::cos(theta + s / c.radius),
                                              c.radius * std::sin(theta + s / c.radius));
                     };
                     const double chord = (gamma(ell / 2) - gamma(-ell / 2)).norm();
                     const double margin = chord - 2.0 * r0 * std::sin(ell / (2.0 * r0));
                     out.min_margin = std::min(out.min_margin, margin);
                     out.max_abs_margin = std::max(out.max_abs_margin, std::abs(margin));
                   }
                 },
                 [&](const manifolds::SphereCap&) {
                   const double r0 = 1.0;
                   const auto mids = oracle.sample(trials, derive_seed(seed, 1));
                   for (std::size_t k = 0; k < trials; ++k) {
                     const Eigen::Vector3d p = mids.point(k).transpose();
                     const Eigen::Vector3d v = random_unit_tangent(rng, p);
                     const double ell = rng.uniform(0.0, M_PI * r0);
                     auto gamma = [&](double s) -> Eigen::Vector3d { return std::cos(s) * p + std::sin(s) * v; };
                     const double chord = (gamma(ell / 2) - gamma(-ell / 2)).norm();
                     const double margin = chord - 2.0 * r0 * std::sin(ell / (2.0 * r0));
                     out.min_margin = std::min(out.min_margin, margin);
                     out.max_abs_margin = std::max(out.max_abs_margin, std::abs(margin));
                   }
                 },
                 [&](const auto&) {
                   throw Error("unsupported_oracle",
                               "minimum length check needs unit-speed geodesics (sphere or circle oracle)");
                 },
             },
             oracle.shape());
  if (trials == 0) out.min_margin = 0.0;
  return out;
}

DeltaSamplingCheck check_delta_sampling(const ManifoldOracle& oracle, const PointCloud& cloud, double delta,
                                        std::size_t probes, RandomSeed seed) {
  DeltaSamplingCheck out;
  out.probes = probes;
  if (probes == 0) return out;
  if (cloud.size() == 0) throw Error("invalid_argument", "delta-sampling check needs a nonempty cloud");
  const auto probe_cloud = oracle.sample(probes, seed);
  std::vector<double> gaps(probes, kInfinity);
  parallel_for(probes, [&](std::size_t p) {
    const auto x = probe_cloud.point(p);
    double best = kInfinity;
    for (std::size_t i = 0; i < cloud.size(); ++i) best = std::min(best, oracle.distance(x, cloud.point(i)));
    gaps[p] = best;
  });
  out.worst_gap = *std::max_element(gaps.begin(), gaps.end());
  out.satisfied = out.worst_gap < delta;
  return out;
}

double sampling_lemma_bound(std::size_t k, double b, std::size_t n) {
  if (!(b > 0.0) || b > 1.0) throw Error("invalid_argument", "ball mass b must lie in (0, 1]");
  if (k < 1) throw Error("invalid_argument", "cover size k must be at least 1");
  const double miss = b == 1.0 ? (n == 0 ? 1.0 : 0.0) : std::pow(1.0 - b, static_cast<double>(n));
  return std::max(0.0, 1.0 - static_cast<double>(k) * miss);
}

PointCloud greedy_net(const ManifoldOracle& oracle, double radius, std::size_t reference_size, RandomSeed seed) {
  if (!(radius > 0.0)) throw Error("invalid_argument", "net radius must be positive");
  if (reference_size == 0) throw Error("invalid_argument", "net needs a nonempty reference sample");
  const auto ref = oracle.sample(reference_size, seed);
  std::vector<double> nearest(reference_size, kInfinity);
  std::vector<std::size_t> chosen;
  std::size_t next = 0;
  while (true) {
    chosen.push_back(next);
    const auto c = ref.point(next);
    parallel_for(reference_size, [&](std::size_t i) { nearest[i] = std::min(nearest[i], oracle.distance(c, ref.point(i))); });
    const auto far = std::max_element(nearest.begin(), nearest.end());
    if (*far <= radius) break;
    next = static_cast<std::size_t>(std::distance(nearest.begin(), far));
  }
  PointCloud centers{Matrix(static_cast<Eigen::Index>(chosen.size()), ref.points.cols()), {}};
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    centers.points.row(static_cast<Eigen::Index>(k)) = ref.points.row(static_cast<Eigen::Index>(chosen[k]));
  }
  return centers;
}

SamplingCover build_sampling_cover(const ManifoldOracle& oracle, double delta, RandomSeed seed,
                                   std::size_t reference_size, std::size_t mass_draws) {
  if (mass_draws == 0) throw Error("invalid_argument", "ball masses need at least one draw");
  SamplingCover cover;
  cover.ball_radius = delta / 2.0;
  cover.centers = greedy_net(oracle, cover.ball_radius, reference_size, derive_seed(seed, 0));
  const auto draws = oracle.sample(mass_draws, derive_seed(seed, 1));
  cover.masses.assign(cover.k(), 0.0);
  parallel_for(cover.k(), [&](std::size_t c) {
    const auto center = cover.centers.point(c);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < mass_draws; ++i) {
      if (oracle.distance(center, draws.point(i)) < cover.ball_radius) ++hits;
    }
    cover.masses[c] = static_cast<double>(hits) / static_cast<double>(mass_draws);
  });
  cover.b = *std::min_element(cover.masses.begin(), cover.masses.end());
  return cover;
}

SamplingLemmaCheck check_sampling_lemma(const ManifoldOracle& oracle, const SamplingCover& cover, std::size_t n,
                                        std::size_t repetitions, RandomSeed seed) {
  if (repetitions == 0) throw Error("invalid_argument", "sampling lemma check needs repetitions >= 1");
  SamplingLemmaCheck out;
  out.k = cover.k();
  out.ball_radius = cover.ball_radius;
  out.b = cover.b;
  out.mass_exceeds_radius = cover.b > cover.ball_radius;
  out.n = n;
  out.repetitions = repetitions;
  out.bound = sampling_lemma_bound(out.k, out.b, n);
  std::vector<char> covered(repetitions, 0);
  parallel_for(repetitions, [&](std::size_t r) {
    const auto sample = oracle.sample(n, derive_seed(seed, r));
    for (std::size_t c = 0; c < cover.k(); ++c) {
      const auto center = cover.centers.point(c);
      bool hit = false;
      for (std::size_t i = 0; i < n && !hit; ++i) hit = oracle.distance(center, sample.point(i)) < cover.ball_radius;
      if (!hit) return;
    }
    covered[r] = 1;
  });
  const auto hits = static_cast<double>(std::count(covered.begin(), covered.end(), 1));
  out.frequency = hits / static_cast<double>(repetitions);
  out.standard_error = std::sqrt(out.frequency * (1.0 - out.frequency) / static_cast<double>(repetitions));
  return out;
}

SandwichAudit audit_sandwich(const ManifoldOracle& oracle, const PointCloud& cloud, const Matrix& metric,
                             const BoundContext& context) {
  const std::size_t n = cloud.size();
  if (metric.rows() != static_cast<Eigen::Index>(n) || metric.cols() != static_cast<Eigen::Index>(n)) {
    throw Error("shape_mismatch", "metric size does not match the cloud");
  }
  SandwichAudit audit;
  audit.eps_lt_s0 = context.eps_lt_s0();
  audit.eps_curvature_ok = context.eps_curvature_ok();
  audit.delta_ok = context.delta_ok();
  audit.certified = context.hypotheses_hold() && !context.corner_caveat;

  struct RowStats {
    std::size_t pairs = 0, low = 0, high = 0;
    double min_ratio = kInfinity, max_ratio = 0.0;
  };
  std::vector<RowStats> rows(n);
  const double lo = 1.0 - context.lambda;
  const double hi = 1.0 + context.lambda;
  parallel_for(n, [&](std::size_t i) {
    auto& s = rows[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dm = oracle.distance(cloud.point(i), cloud.point(j));
      const double dg = metric(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      ++s.pairs;
      if (dg < lo * dm) ++s.low;
      if (dg > hi * dm) ++s.high;
      if (dm > 0.0) {
        s.min_ratio = std::min(s.min_ratio, dg / dm);
        s.max_ratio = std::max(s.max_ratio, dg / dm);
      }
    }
  });
  for (const auto& s : rows) {
    audit.pairs += s.pairs;
    audit.violations_low += s.low;
    audit.violations_high += s.high;
    audit.worst_ratio_low = std::min(audit.worst_ratio_low, s.min_ratio);
    audit.worst_ratio_high = std::max(audit.worst_ratio_high, s.max_ratio);
  }
  return audit;
}

std::string audit_report_json(const SandwichAudit& audit) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
  nlohmann::ordered_json j;
  j["hypotheses"] = {{"eps_lt_s0", audit.eps_lt_s0},
                     {"eps_curvature_ok", audit.eps_curvature_ok},
                     {"delta_ok", audit.delta_ok}};
  j["certified"] = audit.certified;
  j["pairs"] = audit.pairs;
  j["violations_low"] = audit.violations_low;
  j["violations_high"] = audit.violations_high;
  j["worst_ratio_low"] = finite_or_null(audit.worst_ratio_low);
  j["worst_ratio_high"] = finite_or_null(audit.worst_ratio_high);
  return j.dump(2) + "\n";
}

}  // namespace geodesica::convergence
