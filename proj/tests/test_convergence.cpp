#include "oracles.hpp"

#include "geodesica/convergence.hpp"
#include "geodesica/geograph.hpp"
#include "geodesica/manifolds.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace geodesica;
using namespace geodesica::convergence;
namespace mf = geodesica::manifolds;

TEST_CASE("closed-form curvature bounds") {
  CHECK(analytic_bound_params(mf::ManifoldOracle(mf::SphereCap{M_PI})).r0 == 1.0);
  CHECK(analytic_bound_params(mf::ManifoldOracle(mf::CircleCurve{1.0 / M_PI})).r0 == doctest::Approx(1.0 / M_PI));

  const auto annulus = analytic_bound_params(mf::ManifoldOracle(mf::RectangularAnnulus{{-1, -1, 1, 1}, {-2, -2, 2, 2}}));
  CHECK(std::isinf(annulus.r0));
  CHECK(annulus.corner_caveat);

  // Spiral curvature is largest at the start of the range here.
  for (double t : {0.5, 1.0, 3.0}) {
    const double h = 1e-4;
    auto sigma = [](double s) { return Eigen::Vector2d(s * std::cos(s), s * std::sin(s)); };
    const Eigen::Vector2d d1 = (sigma(t + h) - sigma(t - h)) / (2 * h);
    const Eigen::Vector2d d2 = (sigma(t + h) - 2 * sigma(t) + sigma(t - h)) / (h * h);
    const double kappa = std::abs(d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.norm(), 3);
    CHECK(spiral_curvature(1.0, t) == doctest::Approx(kappa).epsilon(1e-6));
  }
  const auto roll = analytic_bound_params(mf::ManifoldOracle(mf::SwissRoll{1.0, 1.0, 10.0, 0.0, 1.0}), 2000);
  double best = kInfinity;
  for (int k = 0; k <= 200000; ++k) best = std::min(best, 1.0 / spiral_curvature(1.0, 1.0 + 9.0 * k / 200000.0));
  CHECK(roll.r0 == doctest::Approx(best).epsilon(1e-9));
  CHECK(roll.r0 == doctest::Approx(std::pow(2.0, 1.5) / 3.0).epsilon(1e-9));
  CHECK(roll.s0_estimated);

  CHECK(max_epsilon_for_curvature(1.0, 0.1) == doctest::Approx(2.0 / M_PI * std::sqrt(2.4)));
}

TEST_CASE("hypothesis predicates") {
  BoundContext c;
  c.r0 = 1.0;
  c.s0 = 2.0;
  c.lambda = 0.1;
  c.epsilon = 0.9;
  c.delta = 0.0225;
  CHECK(c.eps_lt_s0());
  CHECK(c.eps_curvature_ok());
  CHECK(c.delta_ok());
  CHECK(c.hypotheses_hold());
  c.delta = 0.023;
  CHECK_FALSE(c.delta_ok());
  c.delta = 0.0225;
  c.epsilon = 1.0;
  CHECK_FALSE(c.eps_curvature_ok());
  c.epsilon = 0.9;
  c.s0 = 0.9;
  CHECK_FALSE(c.eps_lt_s0());
}

TEST_CASE("branch separation estimates") {
  const mf::ManifoldOracle sphere(mf::SphereCap{M_PI});
  CHECK(std::isinf(estimate_branch_separation(sphere, 5000, {1})));
  const mf::ManifoldOracle spiral(mf::Spiral{0.05, 20.0, 20.0 + 3.0 * M_PI});
  CHECK(std::isinf(estimate_branch_separation(spiral, 0, {1}, 3.0)));

  // Adjacent turns are about 2 pi beta apart; same-turn pairs longer than
  // pi r0 (r0 near 1 here) have chords near 2.
  const double gap = 2.0 * M_PI * 0.05;
  const double est = estimate_branch_separation(spiral, 200000, {2}, M_PI * 0.95);
  CHECK(est >= 0.99 * gap);
  CHECK(est <= 1.25 * gap);
}

TEST_CASE("minimum length lemma") {
  const auto s = check_min_length_lemma(mf::ManifoldOracle(mf::SphereCap{M_PI}), 10000, {3});
  CHECK(s.trials == 10000);
  CHECK(s.min_margin >= -1e-9);
  CHECK(s.max_abs_margin <= 1e-9);
  for (double r : {0.5, 1.0, 2.0}) {
    const auto c = check_min_length_lemma(mf::ManifoldOracle(mf::CircleCurve{r}), 10000, {4});
    CHECK(c.min_margin >= -1e-9);
  }
  // Circle of radius 2, arc length pi.
  const double r = 2.0, l = M_PI;
  const Eigen::Vector2d a(r * std::cos(-l / (2 * r)), r * std::sin(-l / (2 * r)));
  const Eigen::Vector2d b(r * std::cos(l / (2 * r)), r * std::sin(l / (2 * r)));
  CHECK((a - b).norm() == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK_THROWS_AS(check_min_length_lemma(mf::ManifoldOracle(mf::Spiral{}), 10, {1}), Error);
}

TEST_CASE("delta sampling") {
  SUBCASE("dense grid on a flat annulus") {
    const mf::RectangularAnnulus ann{{-0.5, -0.5, 0.5, 0.5}, {-1, -1, 1, 1}};
    const double h = 0.05;
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const Eigen::Vector2d p(-1 + i * h, -1 + j * h);
        if (mf::annulus_contains(ann, p)) pts.push_back(p);
      }
    PointCloud grid{Matrix(static_cast<Eigen::Index>(pts.size()), 2), {}};
    for (std::size_t k = 0; k < pts.size(); ++k) grid.points.row(static_cast<Eigen::Index>(k)) = pts[k].transpose();
    const auto c = check_delta_sampling(mf::ManifoldOracle(ann), grid, h, 5000, {5});
    CHECK(c.satisfied);
    CHECK(c.worst_gap <= h * std::sqrt(2.0) / 2.0 + 1e-12);
  }
  SUBCASE("single point on the sphere") {
    PointCloud one{Matrix(1, 3), {}};
    one.points << 0, 0, 1;
    const auto c = check_delta_sampling(mf::ManifoldOracle(mf::SphereCap{M_PI}), one, 1.0, 5000, {6});
    CHECK_FALSE(c.satisfied);
    CHECK(c.worst_gap == doctest::Approx(M_PI).epsilon(0.02));
    const auto none = check_delta_sampling(mf::ManifoldOracle(mf::SphereCap{M_PI}), one, 1.0, 0, {6});
    CHECK(none.satisfied);
    CHECK(none.worst_gap == 0.0);
  }
  SUBCASE("strict inequality") {
    // Two antipodal points on the unit circle: the gap approaches pi/2 from below.
    PointCloud two{Matrix(2, 2), {}};
    two.points << 1, 0, -1, 0;
    const auto c = check_delta_sampling(mf::ManifoldOracle(mf::CircleCurve{1.0}), two, M_PI / 2, 2000, {7});
    CHECK(c.satisfied);
    CHECK(c.worst_gap < M_PI / 2);
  }
}

TEST_CASE("sampling lemma bound") {
  CHECK(sampling_lemma_bound(10, 0.1, 100) == doctest::Approx(1.0 - 10.0 * std::pow(0.9, 100)));
  CHECK(sampling_lemma_bound(10, 0.1, 100) == doctest::Approx(0.999734).epsilon(1e-6));
  CHECK(sampling_lemma_bound(7, 1.0, 1) == 1.0);
  CHECK(sampling_lemma_bound(3, 0.5, 0) == 0.0);
  CHECK_THROWS_AS(sampling_lemma_bound(3, 0.0, 5), Error);
  CHECK_THROWS_AS(sampling_lemma_bound(3, 1.5, 5), Error);
  for (std::size_t k : {1, 5, 50})
    for (double b : {0.01, 0.1, 0.5})
      for (std::size_t n : {0, 10, 100, 1000}) {
        CHECK(sampling_lemma_bound(k, b, n + 1) >= sampling_lemma_bound(k, b, n));
        CHECK(sampling_lemma_bound(k, b * 1.5, n) >= sampling_lemma_bound(k, b, n));
        CHECK(sampling_lemma_bound(k + 1, b, n) <= sampling_lemma_bound(k, b, n));
      }
}

TEST_CASE("greedy nets and covers") {
  const mf::ManifoldOracle circle(mf::CircleCurve{1.0});
  const auto net = greedy_net(circle, 0.1, 3000, {8});
  CHECK(net.points == greedy_net(circle, 0.1, 3000, {8}).points);
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j) CHECK(circle.distance(net.point(i), net.point(j)) > 0.1);
  // A 0.1-net of a circle of length 2 pi needs at least pi / 0.1 centers.
  CHECK(net.size() >= 32);

  const auto cover = build_sampling_cover(circle, 0.2, {9}, 3000, 100000);
  CHECK(cover.ball_radius == doctest::Approx(0.1));
  const double exact = 0.1 / M_PI;  // arc of length 0.2 out of 2 pi
  const double se = std::sqrt(exact * (1 - exact) / 100000.0);
  for (double m : cover.masses) CHECK(std::abs(m - exact) < 5 * se);
  CHECK(cover.b == *std::min_element(cover.masses.begin(), cover.masses.end()));

  const auto check = check_sampling_lemma(circle, cover, 130, 500, {10});
  CHECK(check.k == cover.k());
  CHECK(check.passes());
  CHECK(check.bound == doctest::Approx(sampling_lemma_bound(cover.k(), cover.b, 130)));
}

TEST_CASE("sandwich audit") {
  const mf::ManifoldOracle circle(mf::CircleCurve{1.0});
  const auto cloud = oracle::jittered_circle(450, 1.0, 11);
  const auto g = geograph::build_graph(cloud, geograph::NeighborRule::eps(0.6));
  const auto dg = geograph::shortest_paths(g);
  const auto ds = geograph::shortest_paths(g, cloud, circle);
  auto ctx = analytic_bound_params(circle);
  ctx.epsilon = 0.6;
  ctx.lambda = 0.1;
  ctx.delta = 0.015;
  REQUIRE(check_delta_sampling(circle, cloud, ctx.delta, 5000, {12}).satisfied);

  const auto a = audit_sandwich(circle, cloud, dg.distances.matrix(), ctx);
  CHECK(a.pairs == 450 * 449 / 2);
  CHECK(a.certified);
  CHECK(a.violations_low == 0);
  CHECK(a.violations_high == 0);
  CHECK(a.worst_ratio_low >= 0.9);
  CHECK(a.worst_ratio_high <= 1.1);

  // Upper bound through d_S.
  const auto s = audit_sandwich(circle, cloud, ds.distances.matrix(), ctx);
  CHECK(s.violations_high == 0);

  // Widening the interval never adds violations.
  Matrix scaled = 0.93 * dg.distances.matrix();
  std::size_t previous = std::numeric_limits<std::size_t>::max();
  for (double lambda : {0.01, 0.05, 0.1, 0.5, 0.99}) {
    auto c = ctx;
    c.lambda = lambda;
    const auto r = audit_sandwich(circle, cloud, scaled, c);
    CHECK(r.violations_low + r.violations_high <= previous);
    CHECK(r.violations_low + r.violations_high <= r.pairs);
    previous = r.violations_low + r.violations_high;
  }

  const auto report = nlohmann::json::parse(audit_report_json(a));
  CHECK(report.at("hypotheses").at("eps_lt_s0") == true);
  CHECK(report.at("hypotheses").at("eps_curvature_ok") == true);
  CHECK(report.at("hypotheses").at("delta_ok") == true);
  CHECK(report.at("pairs") == a.pairs);
  CHECK(report.contains("worst_ratio_low"));

  CHECK_THROWS_AS(audit_sandwich(circle, cloud, Matrix::Zero(3, 3), ctx), Error);
}

TEST_CASE("corner domains are never certified") {
  const mf::ManifoldOracle ann(mf::RectangularAnnulus{{-0.05, 0.05, 0.05, 0.95}, {-0.1, 0.0, 0.1, 1.0}});
  const auto cloud = ann.sample(200, {13});
  const auto dg = geograph::shortest_paths(geograph::build_graph(cloud, geograph::NeighborRule::eps(0.1)));
  auto ctx = analytic_bound_params(ann);
  ctx.epsilon = 0.1;
  ctx.lambda = 0.1;
  ctx.delta = 0.0025;
  CHECK_FALSE(audit_sandwich(ann, cloud, dg.distances.matrix(), ctx).certified);
}
