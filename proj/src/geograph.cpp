#include "geodesica/geograph.hpp"

#include "geodesica/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

namespace geodesica::geograph {
namespace {

struct Csr {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> targets;
  std::vector<double> weights;
};

Csr to_csr(std::size_t n, const std::vector<Edge>& edges, const std::vector<double>& weights) {
  Csr csr;
  csr.offsets.assign(n + 1, 0);
  for (const auto& e : edges) {
    ++csr.offsets[e.i + 1];
    ++csr.offsets[e.j + 1];
  }
  std::partial_sum(csr.offsets.begin(), csr.offsets.end(), csr.offsets.begin());
  csr.targets.resize(2 * edges.size());
  csr.weights.resize(2 * edges.size());
  std::vector<std::size_t> fill(csr.offsets.begin(), csr.offsets.end() - 1);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    csr.targets[fill[e.i]] = e.j;
    csr.weights[fill[e.i]++] = weights[k];
    csr.targets[fill[e.j]] = e.i;
    csr.weights[fill[e.j]++] = weights[k];
  }
  return csr;
}

void dijkstra(const Csr& g, std::size_t source, double* dist, std::size_t n) {
  std::fill(dist, dist + n, kInfinity);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (std::size_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
      const std::size_t v = g.targets[k];
      const double candidate = d + g.weights[k];
      if (candidate < dist[v]) {
        dist[v] = candidate;
        heap.emplace(candidate, v);
      }
    }
  }
}

GraphMetric all_pairs(const NeighborhoodGraph& graph, const std::vector<double>& weights, MetricKind kind) {
  const std::size_t n = graph.n;
  const Csr csr = to_csr(n, graph.edges, weights);
  // Row-major scratch so each source writes one contiguous row.
  std::vector<double> rows(n * n);
  parallel_for(n, [&](std::size_t s) { dijkstra(csr, s, rows.data() + s * n, n); });
  const auto N = static_cast<Eigen::Index>(n);
  Matrix D(N, N);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // The two single-source runs can round differently; keep the smaller so
      // the matrix is exactly symmetric.
      D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::min(rows[i * n + j], rows[j * n + i]);
    }
  }
  return GraphMetric{DissimilarityMatrix::trusted(std::move(D)), kind, connected_components(graph)};
}

std::vector<std::vector<std::pair<double, std::size_t>>> brute_force_neighbors(const Matrix& X, double radius) {
  const auto n = static_cast<std::size_t>(X.rows());
  std::vector<std::vector<std::pair<double, std::size_t>>> out(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (X.row(static_cast<Eigen::Index>(i)) - X.row(static_cast<Eigen::Index>(j))).norm();
      if (d <= radius) out[i].emplace_back(d, j);
    }
  });
  return out;
}

// Uniform grid with cell side `radius`; candidate pairs come from the 3^q
// neighboring cells. Only used for q <= 3.
std::vector<std::vector<std::pair<double, std::size_t>>> grid_neighbors(const Matrix& X, double radius) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto q = X.cols();
  using Key = std::array<long long, 3>;
  auto key_of = [&](std::size_t i) {
    Key key{0, 0, 0};
    for (Eigen::Index c = 0; c < q; ++c) {
      key[static_cast<std::size_t>(c)] =
          static_cast<long long>(std::floor(X(static_cast<Eigen::Index>(i), c) / radius));
    }
    return key;
  };
  std::map<Key, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i) cells[key_of(i)].push_back(i);
  std::vector<std::vector<std::pair<double, std::size_t>>> out(n);
  parallel_for(n, [&](std::size_t i) {
    const Key base = key_of(i);
    const int span_y = q >= 2 ? 1 : 0;
    const int span_z = q >= 3 ? 1 : 0;
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -span_y; dy <= span_y; ++dy) {
        for (int dz = -span_z; dz <= span_z; ++dz) {
          const auto it = cells.find(Key{base[0] + dx, base[1] + dy, base[2] + dz});
          if (it == cells.end()) continue;
          for (const std::size_t j : it->second) {
            if (j <= i) continue;
            const double d = (X.row(static_cast<Eigen::Index>(i)) - X.row(static_cast<Eigen::Index>(j))).norm();
            if (d <= radius) out[i].emplace_back(d, j);
          }
        }
      }
    }
    std::sort(out[i].begin(), out[i].end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  });
  return out;
}

}  // namespace

NeighborhoodGraph build_graph(const PointCloud& cloud, const NeighborRule& rule) {
  const std::size_t n = cloud.size();
  NeighborhoodGraph graph{n, rule, {}};
  const Matrix& X = cloud.points;

  if (rule.type == NeighborRule::Type::Epsilon) {
    if (!(rule.epsilon > 0.0)) throw Error("invalid_argument", "epsilon must be positive");
    const bool use_grid = n > kBruteForceLimit && X.cols() <= 3;
    const auto neighbors = use_grid ? grid_neighbors(X, rule.epsilon) : brute_force_neighbors(X, rule.epsilon);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& [d, j] : neighbors[i]) graph.edges.push_back({i, j, d});
    }
    return graph;
  }

  if (rule.k == 0) throw Error("invalid_argument", "K must be at least 1");
  const std::size_t k = std::min(rule.k, n == 0 ? 0 : n - 1);
  std::vector<std::vector<std::size_t>> lists(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::pair<double, std::size_t>> cand;
    cand.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back((X.row(static_cast<Eigen::Index>(i)) - X.row(static_cast<Eigen::Index>(j))).norm(), j);
    }
    // Pair ordering breaks distance ties by the smaller index.
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    for (std::size_t r = 0; r < k; ++r) lists[i].push_back(cand[r].second);
  });
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (const std::size_t j : lists[i]) pairs.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  for (const auto& [i, j] : pairs) {
    graph.edges.push_back(
        {i, j, (X.row(static_cast<Eigen::Index>(i)) - X.row(static_cast<Eigen::Index>(j))).norm()});
  }
  return graph;
}

GraphMetric shortest_paths(const NeighborhoodGraph& graph) {
  std::vector<double> weights;
  weights.reserve(graph.edges.size());
  for (const auto& e : graph.edges) weights.push_back(e.weight);
  return all_pairs(graph, weights, MetricKind::Euclidean);
}

GraphMetric shortest_paths(const NeighborhoodGraph& graph, const PointCloud& cloud,
                           const manifolds::ManifoldOracle& oracle) {
  if (cloud.size() != graph.n) throw Error("shape_mismatch", "cloud size does not match graph");
  std::vector<double> weights(graph.edges.size());
  parallel_for(graph.edges.size(), [&](std::size_t k) {
    const auto& e = graph.edges[k];
    weights[k] = oracle.distance(cloud.point(e.i), cloud.point(e.j));
  });
  return all_pairs(graph, weights, MetricKind::Oracle);
}

std::vector<std::size_t> connected_components(const NeighborhoodGraph& graph) {
  const std::size_t n = graph.n;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : graph.edges) {
    const auto a = find(e.i);
    const auto b = find(e.j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> component(n);
  std::vector<std::size_t> id_of_root(n, n);
  std::size_t next = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto r = find(v);
    if (id_of_root[r] == n) id_of_root[r] = next++;
    component[v] = id_of_root[r];
  }
  return component;
}

ComponentReport connectivity_report(const NeighborhoodGraph& graph, const PointCloud& cloud) {
  if (cloud.size() != graph.n) throw Error("shape_mismatch", "cloud size does not match graph");
  ComponentReport report;
  report.component_of = connected_components(graph);
  for (const auto c : report.component_of) {
    if (c >= report.sizes.size()) report.sizes.resize(c + 1, 0);
    ++report.sizes[c];
  }
  // Prim on the complete Euclidean graph; the largest tree edge is the
  // bottleneck distance.
  const std::size_t n = cloud.size();
  std::vector<double> best(n, kInfinity);
  std::vector<bool> in_tree(n, false);
  double bottleneck = 0.0;
  if (n > 0) best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!in_tree[v] && (u == n || best[v] < best[u])) u = v;
    }
    in_tree[u] = true;
    bottleneck = std::max(bottleneck, best[u]);
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double d = (cloud.points.row(static_cast<Eigen::Index>(u)) - cloud.points.row(static_cast<Eigen::Index>(v))).norm();
      best[v] = std::min(best[v], d);
    }
  }
  report.min_connecting_epsilon = bottleneck;
  return report;
}

std::vector<std::size_t> largest_component(const std::vector<std::size_t>& component_of) {
  if (component_of.empty()) return {};
  const std::size_t count = *std::max_element(component_of.begin(), component_of.end()) + 1;
  std::vector<std::size_t> sizes(count, 0);
  for (const auto c : component_of) ++sizes[c];
  const auto best = static_cast<std::size_t>(std::distance(sizes.begin(), std::max_element(sizes.begin(), sizes.end())));
  std::vector<std::size_t> keep;
  for (std::size_t v = 0; v < component_of.size(); ++v) {
    if (component_of[v] == best) keep.push_back(v);
  }
  return keep;
}

PointCloud restrict_cloud(const PointCloud& cloud, const std::vector<std::size_t>& keep) {
  PointCloud out{Matrix(static_cast<Eigen::Index>(keep.size()), cloud.points.cols()), {}};
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.points.row(static_cast<Eigen::Index>(r)) = cloud.points.row(static_cast<Eigen::Index>(keep[r]));
    if (!cloud.labels.empty()) out.labels.push_back(cloud.labels[keep[r]]);
  }
  return out;
}

DissimilarityMatrix restrict_matrix(const DissimilarityMatrix& delta, const std::vector<std::size_t>& keep) {
  const auto m = static_cast<Eigen::Index>(keep.size());
  Matrix out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) out(a, b) = delta(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
  }
  return DissimilarityMatrix::trusted(std::move(out));
}

std::string graph_to_json(const NeighborhoodGraph& graph) {
  nlohmann::ordered_json j;
  j["n"] = graph.n;
  if (graph.rule.type == NeighborRule::Type::Epsilon) {
    j["rule"] = {{"type", "epsilon"}, {"value", graph.rule.epsilon}};
  } else {
    j["rule"] = {{"type", "knn"}, {"value", graph.rule.k}};
  }
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges) edges.push_back({e.i, e.j, e.weight});
  j["edges"] = std::move(edges);
  return j.dump() + "\n";
}

NeighborhoodGraph graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    NeighborhoodGraph graph;
    graph.n = j.at("n").get<std::size_t>();
    const auto type = j.at("rule").at("type").get<std::string>();
    if (type == "epsilon") {
      graph.rule = NeighborRule::eps(j.at("rule").at("value").get<double>());
    } else if (type == "knn") {
      graph.rule = NeighborRule::knn(j.at("rule").at("value").get<std::size_t>());
    } else {
      throw Error("format_error", "graph rule type must be 'epsilon' or 'knn'");
    }
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw Error("format_error", "graph edges must be [i, j, w] triples");
      Edge edge{e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()};
      if (edge.i >= graph.n || edge.j >= graph.n || edge.i == edge.j) {
        throw Error("format_error", "graph edge has an invalid endpoint");
      }
      if (edge.i > edge.j) std::swap(edge.i, edge.j);
      if (!(edge.weight >= 0.0)) throw Error("format_error", "graph edge weight must be nonnegative");
      graph.edges.push_back(edge);
    }
    std::sort(graph.edges.begin(), graph.edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    return graph;
  } catch (const nlohmann::json::exception& ex) {
    throw Error("format_error", std::string("graph JSON: ") + ex.what());
  }
}

}  // namespace geodesica::geograph
