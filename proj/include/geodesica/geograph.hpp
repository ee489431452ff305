#pragma once

#include "geodesica/core.hpp"
#include "geodesica/manifolds.hpp"

#include <string>
#include <vector>

namespace geodesica::geograph {

struct NeighborRule {
  enum class Type { Epsilon, Knn };
  Type type = Type::Epsilon;
  double epsilon = 0.0;  // Type::Epsilon: edge iff |x_i - x_j| <= epsilon
  std::size_t k = 0;     // Type::Knn: union of each point's k nearest

  static NeighborRule eps(double value) { return {Type::Epsilon, value, 0}; }
  static NeighborRule knn(std::size_t value) { return {Type::Knn, 0.0, value}; }
};

struct Edge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected graph with Euclidean edge weights; edges sorted by (i, j).
struct NeighborhoodGraph {
  std::size_t n = 0;
  NeighborRule rule;
  std::vector<Edge> edges;
};

// Brute-force neighbor search is used up to this many points; epsilon graphs
// on larger clouds of dimension <= 3 go through a uniform grid of cell size
// epsilon.
inline constexpr std::size_t kBruteForceLimit = 20000;

NeighborhoodGraph build_graph(const PointCloud& cloud, const NeighborRule& rule);

enum class MetricKind { Euclidean, Oracle };

struct ComponentReport {
  std::vector<std::size_t> component_of;  // component ids numbered by lowest member
  std::vector<std::size_t> sizes;
  // Smallest epsilon connecting the whole cloud: the bottleneck edge of a
  // Euclidean minimum spanning tree.
  double min_connecting_epsilon = 0.0;

  std::size_t count() const { return sizes.size(); }
};

struct GraphMetric {
  DissimilarityMatrix distances;  // +inf between components
  MetricKind kind = MetricKind::Euclidean;
  std::vector<std::size_t> component_of;
};

// d_G: all-pairs shortest paths by per-source binary-heap Dijkstra over
// Euclidean edge weights.
GraphMetric shortest_paths(const NeighborhoodGraph& graph);
// d_S: same edge set, each edge reweighted by the manifold distance.
GraphMetric shortest_paths(const NeighborhoodGraph& graph, const PointCloud& cloud,
                           const manifolds::ManifoldOracle& oracle);

std::vector<std::size_t> connected_components(const NeighborhoodGraph& graph);
ComponentReport connectivity_report(const NeighborhoodGraph& graph, const PointCloud& cloud);

// Vertex indices (ascending) of the largest component; ties go to the
// component containing the lowest index.
std::vector<std::size_t> largest_component(const std::vector<std::size_t>& component_of);

PointCloud restrict_cloud(const PointCloud& cloud, const std::vector<std::size_t>& keep);
DissimilarityMatrix restrict_matrix(const DissimilarityMatrix& delta, const std::vector<std::size_t>& keep);

// Graph JSON: {"n", "rule": {"type", "value"}, "edges": [[i, j, w], ...]}.
std::string graph_to_json(const NeighborhoodGraph& graph);
NeighborhoodGraph graph_from_json(const std::string& text);

}  // namespace geodesica::geograph
