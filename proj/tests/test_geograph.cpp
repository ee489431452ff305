#include "oracles.hpp"

#include "geodesica/geograph.hpp"
#include "geodesica/manifolds.hpp"

#include <doctest.h>

#include <set>

using namespace geodesica;
using namespace geodesica::geograph;

namespace {

PointCloud line_points(std::initializer_list<double> xs) {
  PointCloud c{Matrix(static_cast<Eigen::Index>(xs.size()), 1), {}};
  Eigen::Index i = 0;
  for (double x : xs) c.points(i++, 0) = x;
  return c;
}

std::vector<std::tuple<std::size_t, std::size_t, double>> triples(const NeighborhoodGraph& g) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> out;
  for (const auto& e : g.edges) out.emplace_back(e.i, e.j, e.weight);
  return out;
}

PointCloud random_cloud(std::size_t n, int dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c{Matrix(static_cast<Eigen::Index>(n), dim), {}};
  for (Eigen::Index i = 0; i < c.points.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) c.points(i, j) = u(gen);
  return c;
}

}  // namespace

TEST_CASE("three collinear points") {
  const auto c = line_points({0.0, 1.0, 2.0});
  const std::vector<Edge> expected{{0, 1, 1.0}, {1, 2, 1.0}};
  CHECK(build_graph(c, NeighborRule::eps(1.5)).edges == expected);
  CHECK(build_graph(c, NeighborRule::knn(1)).edges == expected);

  const auto m = shortest_paths(build_graph(c, NeighborRule::eps(1.5)));
  CHECK(m.distances(0, 2) == 2.0);
  CHECK(m.distances(0, 1) == 1.0);
  CHECK(m.kind == MetricKind::Euclidean);
}

TEST_CASE("edge cases of graph construction") {
  const auto single = line_points({3.0});
  CHECK(build_graph(single, NeighborRule::eps(1.0)).edges.empty());
  const auto report = connectivity_report(build_graph(single, NeighborRule::eps(1.0)), single);
  CHECK(report.count() == 1);
  CHECK(report.min_connecting_epsilon == 0.0);

  // The rule is |x_i - x_j| <= epsilon.
  const auto pair = line_points({0.0, 0.5});
  CHECK(build_graph(pair, NeighborRule::eps(0.5)).edges.size() == 1);
  CHECK(build_graph(pair, NeighborRule::eps(0.4999)).edges.empty());

  CHECK_THROWS_AS(build_graph(pair, NeighborRule::eps(0.0)), Error);
  CHECK_THROWS_AS(build_graph(pair, NeighborRule::knn(0)), Error);
  CHECK(build_graph(pair, NeighborRule::knn(5)).edges.size() == 1);  // K clamped to n - 1

  // K-NN ties go to the smaller index.
  const auto tie = line_points({0.0, -1.0, 1.0});
  const auto g = build_graph(tie, NeighborRule::knn(1));
  CHECK(g.edges == std::vector<Edge>{{0, 1, 1.0}, {0, 2, 1.0}});
}

TEST_CASE("chain of equal weights") {
  const auto c = line_points({0.0, 0.25, 0.5, 0.75, 1.0, 1.25});
  const auto m = shortest_paths(build_graph(c, NeighborRule::eps(0.3)));
  CHECK(m.distances(0, 5) == doctest::Approx(5 * 0.25));
}

TEST_CASE("edges match a brute-force scan") {
  const auto c = random_cloud(150, 3, 4);
  const Matrix D = oracle::naive_distances(c.points);
  const double eps = 0.2;
  std::vector<Edge> expected;
  for (std::size_t i = 0; i < 150; ++i)
    for (std::size_t j = i + 1; j < 150; ++j)
      if (D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= eps)
        expected.push_back({i, j, D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
  const auto g = build_graph(c, NeighborRule::eps(eps));
  REQUIRE(g.edges.size() == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CHECK(g.edges[k].i == expected[k].i);
    CHECK(g.edges[k].j == expected[k].j);
    CHECK(g.edges[k].weight == doctest::Approx(expected[k].weight).epsilon(1e-14));
  }

  // K-NN: every point keeps its K nearest, symmetrized by union.
  const std::size_t K = 4;
  const auto kg = build_graph(c, NeighborRule::knn(K));
  std::set<std::pair<std::size_t, std::size_t>> want;
  for (std::size_t i = 0; i < 150; ++i) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < 150; ++j)
      if (j != i) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) <
             D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
    });
    for (std::size_t k = 0; k < K; ++k) want.emplace(std::min(i, order[k]), std::max(i, order[k]));
  }
  std::set<std::pair<std::size_t, std::size_t>> got;
  for (const auto& e : kg.edges) got.emplace(e.i, e.j);
  CHECK(got == want);
}

TEST_CASE("Dijkstra agrees with Floyd-Warshall") {
  const auto c = random_cloud(120, 2, 5);
  const auto g = build_graph(c, NeighborRule::eps(0.15));
  const auto m = shortest_paths(g);
  const Matrix fw = oracle::floyd_warshall(g.n, triples(g));
  for (Eigen::Index i = 0; i < 120; ++i)
    for (Eigen::Index j = 0; j < 120; ++j) {
      if (std::isinf(fw(i, j))) {
        CHECK(std::isinf(m.distances.matrix()(i, j)));
      } else {
        CHECK(m.distances.matrix()(i, j) == doctest::Approx(fw(i, j)).epsilon(1e-13));
      }
    }
}

TEST_CASE("graph metric properties on a connected cloud") {
  const auto c = random_cloud(200, 2, 6);
  const double eps = 0.2;
  const auto g = build_graph(c, NeighborRule::eps(eps));
  REQUIRE(connectivity_report(g, c).count() == 1);
  const Matrix d = shortest_paths(g).distances.matrix();
  const Matrix chord = oracle::naive_distances(c.points);
  std::size_t bad = 0;
  for (Eigen::Index i = 0; i < 200; ++i)
    for (Eigen::Index j = 0; j < 200; ++j) {
      if (d(i, j) != d(j, i)) ++bad;
      if (d(i, j) < chord(i, j) - 1e-12) ++bad;
      for (Eigen::Index k = 0; k < 200; ++k)
        if (d(i, k) > d(i, j) + d(j, k) + 1e-12) ++bad;
    }
  CHECK(bad == 0);

  const Matrix wider = shortest_paths(build_graph(c, NeighborRule::eps(0.3))).distances.matrix();
  CHECK((wider.array() <= d.array()).all());
}

TEST_CASE("d_G never exceeds d_S") {
  const manifolds::ManifoldOracle sphere(manifolds::SphereCap{M_PI});
  const auto cloud = sphere.sample(300, {7});
  const auto g = build_graph(cloud, NeighborRule::eps(0.5));
  const auto dg = shortest_paths(g);
  const auto ds = shortest_paths(g, cloud, sphere);
  CHECK(ds.kind == MetricKind::Oracle);
  CHECK((dg.distances.matrix().array() <= ds.distances.matrix().array()).all());
}

TEST_CASE("components and the connecting epsilon") {
  // Two clusters with gap 1 between them.
  const auto c = line_points({0.0, 0.1, 0.2, 1.2, 1.3});
  const auto g = build_graph(c, NeighborRule::eps(0.5));
  const auto r = connectivity_report(g, c);
  CHECK(r.count() == 2);
  CHECK(r.sizes == std::vector<std::size_t>{3, 2});
  CHECK(r.min_connecting_epsilon == doctest::Approx(1.0));
  CHECK(r.component_of == std::vector<std::size_t>{0, 0, 0, 1, 1});
  CHECK(largest_component(r.component_of) == std::vector<std::size_t>{0, 1, 2});

  const auto m = shortest_paths(g);
  CHECK(std::isinf(m.distances(0, 4)));
  CHECK(m.distances(3, 4) == doctest::Approx(0.1));

  CHECK(restrict_cloud(c, {3, 4}).points(1, 0) == 1.3);
  const auto sub = restrict_matrix(m.distances, {0, 2});
  CHECK(sub(0, 1) == doctest::Approx(0.2));

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rc = random_cloud(80, 2, 100 + seed);
    const auto rr = connectivity_report(build_graph(rc, NeighborRule::eps(0.05)), rc);
    CHECK(rr.min_connecting_epsilon == doctest::Approx(oracle::kruskal_bottleneck(rc.points)).epsilon(1e-14));
  }
}

TEST_CASE("grid accelerator matches brute force") {
  const auto c = random_cloud(kBruteForceLimit + 500, 2, 8);
  const auto fast = build_graph(c, NeighborRule::eps(0.004));
  // Brute-force reference on the same cloud.
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < c.points.rows(); ++i)
    for (Eigen::Index j = i + 1; j < c.points.rows(); ++j)
      if ((c.points.row(i) - c.points.row(j)).norm() <= 0.004) ++count;
  CHECK(fast.edges.size() == count);
  CHECK(std::is_sorted(fast.edges.begin(), fast.edges.end(),
                       [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); }));
}

TEST_CASE("graph JSON round trip") {
  const auto c = random_cloud(30, 2, 9);
  const auto g = build_graph(c, NeighborRule::knn(3));
  const auto back = graph_from_json(graph_to_json(g));
  CHECK(back.n == g.n);
  CHECK(back.edges == g.edges);
  CHECK(back.rule.type == NeighborRule::Type::Knn);
  CHECK(back.rule.k == 3);
  CHECK_THROWS_AS(graph_from_json("{\"n\": 2, \"rule\": {\"type\": \"ball\", \"value\": 1}, \"edges\": []}"), Error);
  CHECK_THROWS_AS(graph_from_json("{\"n\": 2, \"rule\": {\"type\": \"knn\", \"value\": 1}, \"edges\": [[0, 5, 1.0]]}"), Error);
  CHECK_THROWS_AS(graph_from_json("not json"), Error);
}

TEST_CASE("shortest paths are deterministic") {
  const auto c = random_cloud(100, 3, 10);
  const auto g = build_graph(c, NeighborRule::knn(5));
  CHECK(shortest_paths(g).distances.matrix() == shortest_paths(g).distances.matrix());
}
