#pragma once

// Reference computations used only by the tests. Each one takes a different
// route from the library code it checks.

#include "geodesica/core.hpp"
#include "geodesica/manifolds.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using geodesica::Matrix;
using geodesica::PointCloud;

inline Matrix naive_distances(const Matrix& X) {
  const auto n = X.rows();
  Matrix D = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < X.cols(); ++c) s += (X(i, c) - X(j, c)) * (X(i, c) - X(j, c));
      D(i, j) = std::sqrt(s);
    }
  }
  return D;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Upper-triangle entries of a dissimilarity and of the embedded distances.
inline double pearson_upper(const Matrix& delta, const Matrix& Z) {
  const Matrix D = naive_distances(Z);
  std::vector<double> a, b;
  for (Eigen::Index i = 0; i < delta.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < delta.cols(); ++j) {
      a.push_back(delta(i, j));
      b.push_back(D(i, j));
    }
  }
  return pearson(a, b);
}

inline Matrix floyd_warshall(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  const auto N = static_cast<Eigen::Index>(n);
  Matrix D = Matrix::Constant(N, N, geodesica::kInfinity);
  for (Eigen::Index i = 0; i < N; ++i) D(i, i) = 0.0;
  for (const auto& [i, j, w] : edges) {
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
    D(a, b) = std::min(D(a, b), w);
    D(b, a) = std::min(D(b, a), w);
  }
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) D(i, j) = std::min(D(i, j), D(i, k) + D(k, j));
  return D;
}

// Smallest epsilon connecting the cloud, by Kruskal over all sorted pairs.
inline double kruskal_bottleneck(const Matrix& X) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (n < 2) return 0.0;
  const Matrix D = naive_distances(X);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::sort(pairs.begin(), pairs.end(), [&](const auto& p, const auto& q) {
    return D(static_cast<Eigen::Index>(p.first), static_cast<Eigen::Index>(p.second)) <
           D(static_cast<Eigen::Index>(q.first), static_cast<Eigen::Index>(q.second));
  });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t merged = 0;
  for (const auto& [i, j] : pairs) {
    const auto a = find(i), b = find(j);
    if (a == b) continue;
    parent[a] = b;
    if (++merged == n - 1) return D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return geodesica::kInfinity;
}

// Fibonacci lattice on the unit sphere restricted to a polar cap.
inline PointCloud fibonacci_cap(std::size_t total, double max_colatitude) {
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  const double z_min = std::cos(max_colatitude);
  std::vector<Eigen::Vector3d> pts;
  for (std::size_t i = 0; i < total; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(total);
    if (z < z_min) break;
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * static_cast<double>(i);
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  PointCloud cloud{Matrix(static_cast<Eigen::Index>(pts.size()), 3), {}};
  for (std::size_t i = 0; i < pts.size(); ++i) cloud.points.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return cloud;
}

// One uniform point in each of n equal arcs of the circle.
inline PointCloud jittered_circle(std::size_t n, double radius, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud cloud{Matrix(static_cast<Eigen::Index>(n), 2), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * (static_cast<double>(i) + u(gen)) / static_cast<double>(n);
    cloud.points.row(static_cast<Eigen::Index>(i)) << radius * std::cos(t), radius * std::sin(t);
  }
  return cloud;
}

// Dense grid-graph approximation of annulus geodesics. Grid nodes are joined
// along every primitive direction (dx, dy) with |dx|, |dy| <= reach when the
// straight segment stays out of the hole (checked by fine stepping). Grid
// paths are feasible curves, so the result is never below the true distance.
class AnnulusGrid {
 public:
  AnnulusGrid(const geodesica::manifolds::RectangularAnnulus& a, double spacing, int reach)
      : annulus_(a), h_(spacing), reach_(reach) {
    nx_ = static_cast<int>(std::floor(a.outer.width() / h_ + 1e-9)) + 1;
    ny_ = static_cast<int>(std::floor(a.outer.height() / h_ + 1e-9)) + 1;
    for (int dx = -reach; dx <= reach; ++dx)
      for (int dy = -reach; dy <= reach; ++dy)
        if ((dx != 0 || dy != 0) && std::gcd(dx, dy) == 1) dirs_.emplace_back(dx, dy);
  }

  double distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
    if (clear(a, b)) return (a - b).norm();
    const std::size_t total = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    std::vector<double> dist(total, geodesica::kInfinity);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (const auto& [id, w] : attachments(a)) {
      if (w < dist[id]) {
        dist[id] = w;
        heap.emplace(w, id);
      }
    }
    const auto exits = attachments(b);
    std::vector<double> exit_cost(total, geodesica::kInfinity);
    for (const auto& [id, w] : exits) exit_cost[id] = std::min(exit_cost[id], w);
    double best = geodesica::kInfinity;
    while (!heap.empty()) {
      const auto [d, id] = heap.top();
      heap.pop();
      if (d > dist[id] || d >= best) continue;
      best = std::min(best, d + exit_cost[id]);
      const int ix = static_cast<int>(id % static_cast<std::size_t>(nx_));
      const int iy = static_cast<int>(id / static_cast<std::size_t>(nx_));
      for (const auto& [dx, dy] : dirs_) {
        const int jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jy < 0 || jx >= nx_ || jy >= ny_) continue;
        const auto jd = static_cast<std::size_t>(jy) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(jx);
        if (!inside(node(jd)) || !clear(node(id), node(jd))) continue;
        const double nd = d + h_ * std::hypot(dx, dy);
        if (nd < dist[jd]) {
          dist[jd] = nd;
          heap.emplace(nd, jd);
        }
      }
    }
    return best;
  }

 private:
  Eigen::Vector2d node(std::size_t id) const {
    const auto ix = static_cast<double>(id % static_cast<std::size_t>(nx_));
    const auto iy = static_cast<double>(id / static_cast<std::size_t>(nx_));
    return {annulus_.outer.x_min + ix * h_, annulus_.outer.y_min + iy * h_};
  }

  bool inside(const Eigen::Vector2d& p) const {
    const auto& r = annulus_.inner;
    return !(p.x() > r.x_min && p.x() < r.x_max && p.y() > r.y_min && p.y() < r.y_max);
  }

  // Stepwise test against the open hole, shrunk by a hair so that paths
  // hugging its boundary count as clear.
  bool clear(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
    const auto& r = annulus_.inner;
    const double m = 1e-12;
    if (std::max(a.x(), b.x()) <= r.x_min + m || std::min(a.x(), b.x()) >= r.x_max - m ||
        std::max(a.y(), b.y()) <= r.y_min + m || std::min(a.y(), b.y()) >= r.y_max - m) {
      return true;
    }
    const int steps = std::max(2, static_cast<int>(std::ceil((b - a).norm() / (h_ / 8.0))));
    for (int s = 0; s <= steps; ++s) {
      const Eigen::Vector2d p = a + (b - a) * (static_cast<double>(s) / steps);
      if (p.x() > r.x_min + m && p.x() < r.x_max - m && p.y() > r.y_min + m && p.y() < r.y_max - m) return false;
    }
    return true;
  }

  std::vector<std::pair<std::size_t, double>> attachments(const Eigen::Vector2d& p) const {
    std::vector<std::pair<std::size_t, double>> out;
    const int cx = static_cast<int>(std::round((p.x() - annulus_.outer.x_min) / h_));
    const int cy = static_cast<int>(std::round((p.y() - annulus_.outer.y_min) / h_));
    for (int ix = std::max(0, cx - reach_); ix <= std::min(nx_ - 1, cx + reach_); ++ix) {
      for (int iy = std::max(0, cy - reach_); iy <= std::min(ny_ - 1, cy + reach_); ++iy) {
        const auto id = static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(ix);
        if (inside(node(id)) && clear(p, node(id))) out.emplace_back(id, (p - node(id)).norm());
      }
    }
    return out;
  }

  geodesica::manifolds::RectangularAnnulus annulus_;
  double h_;
  int reach_;
  int nx_ = 0, ny_ = 0;
  std::vector<std::pair<int, int>> dirs_;
};

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& stem) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / (stem + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
