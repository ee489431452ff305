#include "geodesica/manifolds.hpp"

#include "geodesica/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace geodesica::manifolds {
namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kContainTol = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Point2 as_point2(const Eigen::RowVectorXd& p) {
  if (p.size() != 2) throw Error("shape_mismatch", "expected a point in R^2");
  return Point2(p(0), p(1));
}

void require_dim(const Eigen::RowVectorXd& p, Eigen::Index dim) {
  if (p.size() != dim) {
    throw Error("shape_mismatch", "expected a point in R^" + std::to_string(dim) + ", got R^" +
                                      std::to_string(p.size()));
  }
}

void require_contains(const ManifoldOracle& oracle, const Eigen::RowVectorXd& p) {
  if (!oracle.contains(p)) throw Error("outside_domain", "point does not lie on the manifold");
}

double scale_tol(double scale) { return kContainTol * std::max(1.0, scale); }

void validate_rectangle(const Rectangle& r) {
  if (!(r.width() > 0.0) || !(r.height() > 0.0)) {
    throw Error("degenerate_rectangle", "rectangle has zero width or height");
  }
}

void validate_spiral_range(double beta, double t_min, double t_max) {
  if (!(beta > 0.0)) throw Error("invalid_argument", "spiral beta must be positive");
  if (!(t_min > 0.0)) throw Error("invalid_argument", "spiral parameter range must start above 0");
  if (!(t_max > t_min)) throw Error("invalid_argument", "spiral parameter range is empty");
}

// Spiral parameter of a planar point assumed to lie on the spiral: |sigma(t)| = beta t.
double spiral_parameter_of(double beta, const Eigen::Vector2d& p) { return p.norm() / beta; }

bool on_spiral(double beta, double t_min, double t_max, const Eigen::Vector2d& p) {
  const double t = spiral_parameter_of(beta, p);
  const double tol = scale_tol(beta * t_max);
  if (t < t_min - tol / beta || t > t_max + tol / beta) return false;
  return (spiral_point(beta, t) - p).norm() <= tol;
}

}  // namespace

Rectangle Rectangle::from_vertices(const std::vector<Point2>& vertices) {
  if (vertices.size() != 4) throw Error("invalid_argument", "rectangle needs exactly 4 vertices");
  Rectangle r{vertices[0].x(), vertices[0].y(), vertices[0].x(), vertices[0].y()};
  for (const auto& v : vertices) {
    r.x_min = std::min(r.x_min, v.x());
    r.x_max = std::max(r.x_max, v.x());
    r.y_min = std::min(r.y_min, v.y());
    r.y_max = std::max(r.y_max, v.y());
  }
  validate_rectangle(r);
  for (const auto& c : r.corners()) {
    const bool present = std::any_of(vertices.begin(), vertices.end(), [&](const Point2& v) { return v == c; });
    if (!present) throw Error("invalid_argument", "rectangle vertices are not axis-aligned corners");
  }
  return r;
}

std::array<Point2, 4> Rectangle::corners() const {
  return {Point2(x_max, y_min), Point2(x_max, y_max), Point2(x_min, y_max), Point2(x_min, y_min)};
}

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::ClosedCurve: return "closed-curve";
    case ManifoldKind::RectangularAnnulus: return "rectangular-annulus";
    case ManifoldKind::SpherePatch: return "sphere-patch";
    case ManifoldKind::Spiral: return "spiral";
    case ManifoldKind::SwissRoll: return "swiss-roll";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

ManifoldOracle::ManifoldOracle(Shape shape) : shape_(std::move(shape)) {
  std::visit(overloaded{
                 [](const RectangleCurve& c) { validate_rectangle(c.rect); },
                 [](const CircleCurve& c) {
                   if (!(c.radius > 0.0)) throw Error("invalid_argument", "circle radius must be positive");
                 },
                 [](const RectangularAnnulus& a) { validate_annulus(a); },
                 [](const SphereCap& s) {
                   if (!(s.max_colatitude > 0.0) || s.max_colatitude > M_PI) {
                     throw Error("invalid_argument", "sphere cap colatitude must lie in (0, pi]");
                   }
                 },
                 [](const Spiral& s) { validate_spiral_range(s.beta, s.t_min, s.t_max); },
                 [](const SwissRoll& r) {
                   validate_spiral_range(r.beta, r.s_min, r.s_max);
                   if (!(r.h_max > r.h_min)) throw Error("invalid_argument", "swiss roll height range is empty");
                 },
             },
             shape_);
}

ManifoldKind ManifoldOracle::kind() const {
  return std::visit(overloaded{
                        [](const RectangleCurve&) { return ManifoldKind::ClosedCurve; },
                        [](const CircleCurve&) { return ManifoldKind::ClosedCurve; },
                        [](const RectangularAnnulus&) { return ManifoldKind::RectangularAnnulus; },
                        [](const SphereCap&) { return ManifoldKind::SpherePatch; },
                        [](const Spiral&) { return ManifoldKind::Spiral; },
                        [](const SwissRoll&) { return ManifoldKind::SwissRoll; },
                    },
                    shape_);
}

int ManifoldOracle::intrinsic_dim() const {
  switch (kind()) {
    case ManifoldKind::ClosedCurve:
    case ManifoldKind::Spiral: return 1;
    default: return 2;
  }
}

int ManifoldOracle::ambient_dim() const {
  switch (kind()) {
    case ManifoldKind::SpherePatch:
    case ManifoldKind::SwissRoll: return 3;
    default: return 2;
  }
}

bool ManifoldOracle::contains(const Eigen::RowVectorXd& point) const {
  if (point.size() != ambient_dim()) return false;
  return std::visit(
      overloaded{
          [&](const RectangleCurve& c) {
            const Point2 p = as_point2(point);
            const auto& r = c.rect;
            const double tol = scale_tol(r.perimeter());
            if (p.x() < r.x_min - tol || p.x() > r.x_max + tol || p.y() < r.y_min - tol || p.y() > r.y_max + tol) {
              return false;
            }
            const double edge = std::min({p.x() - r.x_min, r.x_max - p.x(), p.y() - r.y_min, r.y_max - p.y()});
            return std::abs(edge) <= tol;
          },
          [&](const CircleCurve& c) {
            return std::abs(as_point2(point).norm() - c.radius) <= scale_tol(c.radius);
          },
          [&](const RectangularAnnulus& a) {
            const Point2 p = as_point2(point);
            const double tol = scale_tol(a.outer.perimeter());
            const auto& o = a.outer;
            const auto& in = a.inner;
            if (p.x() < o.x_min - tol || p.x() > o.x_max + tol || p.y() < o.y_min - tol || p.y() > o.y_max + tol) {
              return false;
            }
            return !(p.x() > in.x_min + tol && p.x() < in.x_max - tol && p.y() > in.y_min + tol &&
                     p.y() < in.y_max - tol);
          },
          [&](const SphereCap& s) {
            const Eigen::Vector3d y(point(0), point(1), point(2));
            if (std::abs(y.norm() - 1.0) > kContainTol) return false;
            return y.z() >= std::cos(s.max_colatitude) - kContainTol;
          },
          [&](const Spiral& s) { return on_spiral(s.beta, s.t_min, s.t_max, as_point2(point)); },
          [&](const SwissRoll& r) {
            const Eigen::Vector2d xy(point(0), point(1));
            const double h = point(2);
            const double tol = scale_tol(r.h_max - r.h_min);
            return on_spiral(r.beta, r.s_min, r.s_max, xy) && h >= r.h_min - tol && h <= r.h_max + tol;
          },
      },
      shape_);
}

double ManifoldOracle::distance(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const {
  require_dim(a, ambient_dim());
  require_dim(b, ambient_dim());
  require_contains(*this, a);
  require_contains(*this, b);
  return std::visit(
      overloaded{
          [&](const RectangleCurve& c) {
            const double length = c.rect.perimeter();
            const double gap = std::abs(rectangle_arc_position(c.rect, as_point2(a)) -
                                        rectangle_arc_position(c.rect, as_point2(b)));
            return std::min(gap, length - gap);
          },
          [&](const CircleCurve& c) {
            const Point2 p = as_point2(a), q = as_point2(b);
            return c.radius * std::atan2(std::abs(p.x() * q.y() - p.y() * q.x()), p.dot(q));
          },
          [&](const RectangularAnnulus& ann) { return annulus_geodesic(ann, as_point2(a), as_point2(b)); },
          [&](const SphereCap&) {
            return great_circle_distance(Eigen::Vector3d(a(0), a(1), a(2)), Eigen::Vector3d(b(0), b(1), b(2)));
          },
          [&](const Spiral& s) {
            const double ta = spiral_parameter_of(s.beta, as_point2(a));
            const double tb = spiral_parameter_of(s.beta, as_point2(b));
            return std::abs(spiral_arclength(s.beta, ta) - spiral_arclength(s.beta, tb));
          },
          [&](const SwissRoll& r) {
            const double sa = spiral_parameter_of(r.beta, Eigen::Vector2d(a(0), a(1)));
            const double sb = spiral_parameter_of(r.beta, Eigen::Vector2d(b(0), b(1)));
            return std::hypot(spiral_arclength(r.beta, sa) - spiral_arclength(r.beta, sb), a(2) - b(2));
          },
      },
      shape_);
}

namespace {

// Points plus their arc-length coordinates (spiral) or isometric (arc, height)
// coordinates (Swiss roll); distance matrices are built from the latter.
struct SpiralDraw {
  PointCloud cloud;
  Matrix flat;
};

SpiralDraw spiral_draw(const Spiral& s, std::size_t n, RandomSeed seed) {
  validate_spiral_range(s.beta, s.t_min, s.t_max);
  Rng rng(seed);
  const double s_lo = spiral_arclength(s.beta, s.t_min);
  const double s_hi = spiral_arclength(s.beta, s.t_max);
  const auto N = static_cast<Eigen::Index>(n);
  SpiralDraw out{{Matrix(N, 2), {}}, Matrix(N, 1)};
  for (Eigen::Index i = 0; i < N; ++i) {
    const double arc = rng.uniform(s_lo, s_hi);
    const double t = std::clamp(spiral_parameter_at(s.beta, arc), s.t_min, s.t_max);
    out.cloud.points.row(i) = spiral_point(s.beta, t).transpose();
    out.flat(i, 0) = arc;
  }
  return out;
}

SpiralDraw swiss_roll_draw(const SwissRoll& r, std::size_t n, RandomSeed seed) {
  validate_spiral_range(r.beta, r.s_min, r.s_max);
  if (!(r.h_max > r.h_min)) throw Error("invalid_argument", "swiss roll height range is empty");
  Rng rng(seed);
  const double s_lo = spiral_arclength(r.beta, r.s_min);
  const double s_hi = spiral_arclength(r.beta, r.s_max);
  const auto N = static_cast<Eigen::Index>(n);
  SpiralDraw out{{Matrix(N, 3), {}}, Matrix(N, 2)};
  for (Eigen::Index i = 0; i < N; ++i) {
    const double arc = rng.uniform(s_lo, s_hi);
    const double h = rng.uniform(r.h_min, r.h_max);
    const double t = std::clamp(spiral_parameter_at(r.beta, arc), r.s_min, r.s_max);
    const auto xy = spiral_point(r.beta, t);
    out.cloud.points.row(i) << xy.x(), xy.y(), h;
    out.flat.row(i) << arc, h;
  }
  return out;
}

}  // namespace

PointCloud ManifoldOracle::sample(std::size_t n, RandomSeed seed) const {
  return std::visit(
      overloaded{
          [&](const RectangleCurve& c) {
            Rng rng(seed);
            PointCloud cloud{Matrix(static_cast<Eigen::Index>(n), 2), {}};
            for (std::size_t i = 0; i < n; ++i) {
              cloud.points.row(static_cast<Eigen::Index>(i)) =
                  rectangle_point_at(c.rect, rng.uniform(0.0, c.rect.perimeter())).transpose();
            }
            return cloud;
          },
          [&](const CircleCurve& c) {
            Rng rng(seed);
            PointCloud cloud{Matrix(static_cast<Eigen::Index>(n), 2), {}};
            for (std::size_t i = 0; i < n; ++i) {
              const double theta = rng.uniform(0.0, kTwoPi);
              cloud.points.row(static_cast<Eigen::Index>(i)) << c.radius * std::cos(theta), c.radius * std::sin(theta);
            }
            return cloud;
          },
          [&](const RectangularAnnulus& a) { return sample_annulus_uniform(a, n, seed); },
          [&](const SphereCap& s) {
            Rng rng(seed);
            PointCloud cloud{Matrix(static_cast<Eigen::Index>(n), 3), {}};
            const double z_min = std::cos(s.max_colatitude);
            for (std::size_t i = 0; i < n; ++i) {
              const double z = rng.uniform(z_min, 1.0);
              const double phi = rng.uniform(0.0, kTwoPi);
              const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
              cloud.points.row(static_cast<Eigen::Index>(i)) << r * std::cos(phi), r * std::sin(phi), z;
            }
            return cloud;
          },
          [&](const Spiral& s) { return spiral_draw(s, n, seed).cloud; },
          [&](const SwissRoll& r) { return swiss_roll_draw(r, n, seed).cloud; },
      },
      shape_);
}

DissimilarityMatrix ManifoldOracle::distance_matrix(const PointCloud& cloud) const {
  const std::size_t n = cloud.size();
  for (std::size_t i = 0; i < n; ++i) require_contains(*this, cloud.point(i));
  Matrix D = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (auto j = ii + 1; j < static_cast<Eigen::Index>(n); ++j) {
      const double d = distance(cloud.points.row(ii), cloud.points.row(j));
      D(ii, j) = d;
      D(j, ii) = d;
    }
  });
  return DissimilarityMatrix::trusted(std::move(D));
}

// Closed curves ----------------------------------------------------------------

Point2 rectangle_point_at(const Rectangle& r, double arc) {
  const double w = r.width();
  const double h = r.height();
  double s = std::fmod(arc, r.perimeter());
  if (s < 0.0) s += r.perimeter();
  if (s < h) return {r.x_max, r.y_min + s};
  s -= h;
  if (s < w) return {r.x_max - s, r.y_max};
  s -= w;
  if (s < h) return {r.x_min, r.y_max - s};
  s -= h;
  return {r.x_min + s, r.y_min};
}

double rectangle_arc_position(const Rectangle& r, const Point2& p) {
  const double w = r.width();
  const double h = r.height();
  // Nearest side decides the parametrization; corners agree between sides.
  const std::array<double, 4> gaps{std::abs(p.x() - r.x_max), std::abs(p.y() - r.y_max), std::abs(p.x() - r.x_min),
                                   std::abs(p.y() - r.y_min)};
  const auto side = std::distance(gaps.begin(), std::min_element(gaps.begin(), gaps.end()));
  double s = 0.0;
  switch (side) {
    case 0: s = std::clamp(p.y() - r.y_min, 0.0, h); break;
    case 1: s = h + std::clamp(r.x_max - p.x(), 0.0, w); break;
    case 2: s = h + w + std::clamp(r.y_max - p.y(), 0.0, h); break;
    default: s = 2.0 * h + w + std::clamp(p.x() - r.x_min, 0.0, w); break;
  }
  return s >= r.perimeter() ? s - r.perimeter() : s;
}

PointCloud sample_closed_curve_rectangle(std::size_t n, const Rectangle& rect) {
  validate_rectangle(rect);
  if (n < 2) throw Error("invalid_argument", "closed curve sample needs n >= 2");
  const double step = rect.perimeter() / static_cast<double>(n);
  PointCloud cloud{Matrix(static_cast<Eigen::Index>(n), 2), {}};
  for (std::size_t k = 0; k < n; ++k) {
    cloud.points.row(static_cast<Eigen::Index>(k)) = rectangle_point_at(rect, static_cast<double>(k) * step).transpose();
  }
  return cloud;
}

PointCloud sample_closed_curve_circle(std::size_t n, double radius) {
  if (n < 2) throw Error("invalid_argument", "closed curve sample needs n >= 2");
  if (!(radius > 0.0)) throw Error("invalid_argument", "circle radius must be positive");
  PointCloud cloud{Matrix(static_cast<Eigen::Index>(n), 2), {}};
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    cloud.points.row(static_cast<Eigen::Index>(k)) << radius * std::cos(theta), radius * std::sin(theta);
  }
  return cloud;
}

DissimilarityMatrix arc_distance_matrix(std::size_t n, double total_length) {
  if (!(total_length > 0.0)) throw Error("invalid_argument", "curve length must be positive");
  const auto N = static_cast<Eigen::Index>(n);
  const double step = total_length / static_cast<double>(n);
  Matrix D(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) {
      const auto k = std::abs(i - j);
      D(i, j) = static_cast<double>(std::min(k, N - k)) * step;
    }
  }
  return DissimilarityMatrix::trusted(std::move(D));
}

// Rectangular annulus ----------------------------------------------------------------

void validate_annulus(const RectangularAnnulus& a) {
  validate_rectangle(a.inner);
  validate_rectangle(a.outer);
  if (!(a.inner.x_min > a.outer.x_min && a.inner.x_max < a.outer.x_max && a.inner.y_min > a.outer.y_min &&
        a.inner.y_max < a.outer.y_max)) {
    throw Error("invalid_annulus", "inner rectangle must lie strictly inside the outer rectangle");
  }
}

bool annulus_contains(const RectangularAnnulus& a, const Point2& p) {
  const auto& o = a.outer;
  const auto& in = a.inner;
  if (p.x() < o.x_min || p.x() > o.x_max || p.y() < o.y_min || p.y() > o.y_max) return false;
  return !(p.x() > in.x_min && p.x() < in.x_max && p.y() > in.y_min && p.y() < in.y_max);
}

RejectionSample sample_annulus_rejection(const RectangularAnnulus& annulus, std::size_t n, RandomSeed seed) {
  validate_annulus(annulus);
  Rng rng(seed);
  RejectionSample result;
  result.cloud.points.resize(static_cast<Eigen::Index>(n), 2);
  const auto& o = annulus.outer;
  std::size_t accepted = 0;
  while (accepted < n) {
    const Point2 p(rng.uniform(o.x_min, o.x_max), rng.uniform(o.y_min, o.y_max));
    ++result.proposals;
    if (!annulus_contains(annulus, p)) continue;
    result.cloud.points.row(static_cast<Eigen::Index>(accepted++)) = p.transpose();
  }
  return result;
}

PointCloud sample_annulus_uniform(const RectangularAnnulus& annulus, std::size_t n, RandomSeed seed) {
  return sample_annulus_rejection(annulus, n, seed).cloud;
}

bool segment_crosses_open_rectangle(const Point2& a, const Point2& b, const Rectangle& r) {
  // Liang-Barsky clip against the closed rectangle, then test whether the
  // clipped piece reaches the open interior.
  const Point2 d = b - a;
  double t0 = 0.0;
  double t1 = 1.0;
  const std::array<double, 4> p{-d.x(), d.x(), -d.y(), d.y()};
  const std::array<double, 4> q{a.x() - r.x_min, r.x_max - a.x(), a.y() - r.y_min, r.y_max - a.y()};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return false;
      continue;
    }
    const double t = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  if (t1 - t0 <= 0.0) return false;
  const Point2 mid = a + 0.5 * (t0 + t1) * d;
  const double tol = 1e-12 * std::max({1.0, r.width(), r.height()});
  return mid.x() > r.x_min + tol && mid.x() < r.x_max - tol && mid.y() > r.y_min + tol && mid.y() < r.y_max - tol;
}

double annulus_geodesic(const RectangularAnnulus& annulus, const Point2& a, const Point2& b) {
  const double tol = scale_tol(annulus.outer.perimeter());
  auto inside = [&](const Point2& p) {
    const auto& o = annulus.outer;
    const auto& in = annulus.inner;
    const bool in_outer = p.x() >= o.x_min - tol && p.x() <= o.x_max + tol && p.y() >= o.y_min - tol &&
                          p.y() <= o.y_max + tol;
    const bool in_hole = p.x() > in.x_min + tol && p.x() < in.x_max - tol && p.y() > in.y_min + tol &&
                         p.y() < in.y_max - tol;
    return in_outer && !in_hole;
  };
  if (!inside(a) || !inside(b)) throw Error("outside_domain", "point lies outside the annulus");
  if (!segment_crosses_open_rectangle(a, b, annulus.inner)) return (a - b).norm();

  // Visibility graph on {a, b, four hole corners}; tiny, so O(V^2) Dijkstra.
  std::array<Point2, 6> nodes{a, b};
  const auto corners = annulus.inner.corners();
  std::copy(corners.begin(), corners.end(), nodes.begin() + 2);
  std::array<double, 6> dist;
  dist.fill(kInfinity);
  std::array<bool, 6> done{};
  dist[0] = 0.0;
  for (int iter = 0; iter < 6; ++iter) {
    int u = -1;
    for (int v = 0; v < 6; ++v) {
      if (!done[v] && (u < 0 || dist[v] < dist[u])) u = v;
    }
    if (u < 0 || std::isinf(dist[u])) break;
    if (u == 1) break;
    done[u] = true;
    for (int v = 0; v < 6; ++v) {
      if (done[v] || v == u) continue;
      if (segment_crosses_open_rectangle(nodes[u], nodes[v], annulus.inner)) continue;
      dist[v] = std::min(dist[v], dist[u] + (nodes[u] - nodes[v]).norm());
    }
  }
  return dist[1];
}

// Sphere ----------------------------------------------------------------------------

Eigen::Vector3d sphere_point(const GeoPoint& g) {
  const double polar = g.lat + M_PI / 2.0;
  return {std::sin(polar) * std::cos(g.lon), std::sin(polar) * std::sin(g.lon), std::cos(polar)};
}

double great_circle_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

SphereEmbedding sphere_sample_and_distance(const std::vector<GeoPoint>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  PointCloud cloud{Matrix(n, 3), {}};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& g = points[static_cast<std::size_t>(i)];
    if (g.lat < -M_PI / 2 || g.lat > M_PI / 2 || g.lon < -M_PI || g.lon > M_PI) {
      throw Error("invalid_argument", "latitude/longitude out of range at point " + std::to_string(i));
    }
    cloud.points.row(i) = sphere_point(g).transpose();
  }
  Matrix D = Matrix::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const Eigen::Vector3d yi = cloud.points.row(i).transpose();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = great_circle_distance(yi, cloud.points.row(j).transpose());
      D(i, j) = d;
      D(j, i) = d;
    }
  });
  return {std::move(cloud), DissimilarityMatrix::trusted(std::move(D))};
}

// Spiral and Swiss roll -------------------------------------------------------------------

double spiral_arclength(double beta, double t) {
  return 0.5 * beta * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

double spiral_parameter_at(double beta, double arclength) {
  if (arclength <= 0.0) return 0.0;
  // Bracketed Newton: S is increasing with S'(t) = beta sqrt(1 + t^2).
  double lo = 0.0;
  double hi = 1.0;
  while (spiral_arclength(beta, hi) < arclength) hi *= 2.0;
  double t = std::clamp(std::sqrt(2.0 * arclength / beta), lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = spiral_arclength(beta, t) - arclength;
    if (f == 0.0) return t;
    if (f > 0.0) hi = t; else lo = t;
    double next = t - f / (beta * std::sqrt(1.0 + t * t));
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, t)) return next;
    t = next;
  }
  return t;
}

Eigen::Vector2d spiral_point(double beta, double t) { return {beta * t * std::cos(t), beta * t * std::sin(t)}; }

SampleWithDistances spiral_sample(const Spiral& s, std::size_t n, RandomSeed seed) {
  auto draw = spiral_draw(s, n, seed);
  return {std::move(draw.cloud), DissimilarityMatrix::trusted(pairwise_distances(draw.flat))};
}

SampleWithDistances swiss_roll_sample(const SwissRoll& r, std::size_t n, RandomSeed seed) {
  auto draw = swiss_roll_draw(r, n, seed);
  return {std::move(draw.cloud), DissimilarityMatrix::trusted(pairwise_distances(draw.flat))};
}

}  // namespace geodesica::manifolds
