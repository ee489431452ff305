#pragma once

#include "geodesica/core.hpp"

#include <array>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace geodesica::manifolds {

using Point2 = Eigen::Vector2d;

// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Rectangle {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  // Bounding box of the given vertices; throws when it has zero width or height.
  static Rectangle from_vertices(const std::vector<Point2>& vertices);

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double perimeter() const { return 2.0 * (width() + height()); }
  double area() const { return width() * height(); }
  std::array<Point2, 4> corners() const;  // counterclockwise from (x_max, y_min)
};

// Perimeter of a rectangle, traversed counterclockwise from the corner
// (x_max, y_min).
struct RectangleCurve {
  Rectangle rect;
};

// Circle of the given radius centered at the origin; arc position 0 at (radius, 0).
struct CircleCurve {
  double radius = 1.0;
};

// Closed region inside `outer` and outside the open rectangle `inner`.
struct RectangularAnnulus {
  Rectangle inner;
  Rectangle outer;

  double area() const { return outer.area() - inner.area(); }
};

// Unit-sphere cap {y : <y, (0,0,1)> >= cos(max_colatitude)}; pi gives the full sphere.
struct SphereCap {
  double max_colatitude = M_PI;
};

// Archimedean spiral sigma(t) = (beta t cos t, beta t sin t), t in [t_min, t_max].
struct Spiral {
  double beta = 1.0;
  double t_min = 1.0;
  double t_max = 10.0;
};

// Swiss roll (s, h) -> (sigma(s), h) over the spiral sigma.
struct SwissRoll {
  double beta = 1.0;
  double s_min = 1.0;
  double s_max = 10.0;
  double h_min = 0.0;
  double h_max = 1.0;
};

enum class ManifoldKind { ClosedCurve, RectangularAnnulus, SpherePatch, Spiral, SwissRoll };

std::string to_string(ManifoldKind kind);

// A benchmark manifold with a uniform sampler and its exact Riemannian
// distance. Immutable after construction; safe for concurrent reads.
class ManifoldOracle {
 public:
  using Shape = std::variant<RectangleCurve, CircleCurve, RectangularAnnulus, SphereCap, Spiral, SwissRoll>;

  explicit ManifoldOracle(Shape shape);

  ManifoldKind kind() const;
  const Shape& shape() const { return shape_; }
  int intrinsic_dim() const;
  int ambient_dim() const;

  bool contains(const Eigen::RowVectorXd& point) const;
  // Exact d_M between two points of the manifold; throws for points outside it.
  double distance(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const;
  // n i.i.d. points, uniform with respect to the Riemannian volume.
  PointCloud sample(std::size_t n, RandomSeed seed) const;
  DissimilarityMatrix distance_matrix(const PointCloud& cloud) const;

 private:
  Shape shape_;
};

// Closed curves --------------------------------------------------------------

// n points equally spaced by arc length along the rectangle perimeter.
PointCloud sample_closed_curve_rectangle(std::size_t n, const Rectangle& rect);
PointCloud sample_closed_curve_circle(std::size_t n, double radius);
// Arc position in [0, perimeter) of a point on the rectangle boundary.
double rectangle_arc_position(const Rectangle& rect, const Point2& p);
Point2 rectangle_point_at(const Rectangle& rect, double arc);

// Shortest-arc distances of n points equally spaced on a closed curve of
// length L: min(|i-j|, n-|i-j|) * L / n.
DissimilarityMatrix arc_distance_matrix(std::size_t n, double total_length);

// Rectangular annulus ---------------------------------------------------------

struct RejectionSample {
  PointCloud cloud;
  std::size_t proposals = 0;
};

void validate_annulus(const RectangularAnnulus& annulus);
bool annulus_contains(const RectangularAnnulus& annulus, const Point2& p);
RejectionSample sample_annulus_rejection(const RectangularAnnulus& annulus, std::size_t n, RandomSeed seed);
PointCloud sample_annulus_uniform(const RectangularAnnulus& annulus, std::size_t n, RandomSeed seed);

// True when segment ab passes through the open interior of rect.
bool segment_crosses_open_rectangle(const Point2& a, const Point2& b, const Rectangle& rect);

// Exact geodesic length in the annulus: the chord when visible, otherwise the
// shortest path through the visibility graph on {a, b, inner corners}.
double annulus_geodesic(const RectangularAnnulus& annulus, const Point2& a, const Point2& b);

// Sphere -----------------------------------------------------------------------

struct GeoPoint {
  double lat = 0.0;  // phi, radians
  double lon = 0.0;  // lambda, radians
};

Eigen::Vector3d sphere_point(const GeoPoint& g);
double great_circle_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

struct SphereEmbedding {
  PointCloud cloud;  // points in R^3
  DissimilarityMatrix distances;
};

SphereEmbedding sphere_sample_and_distance(const std::vector<GeoPoint>& points);

// Spiral and Swiss roll ----------------------------------------------------------

// Arc length of the Archimedean spiral from 0 to t: beta/2 (t sqrt(1+t^2) + asinh t).
double spiral_arclength(double beta, double t);
// Inverse of spiral_arclength on t >= 0.
double spiral_parameter_at(double beta, double arclength);
Eigen::Vector2d spiral_point(double beta, double t);

struct SampleWithDistances {
  PointCloud cloud;
  DissimilarityMatrix distances;
};

SampleWithDistances spiral_sample(const Spiral& spiral, std::size_t n, RandomSeed seed);
SampleWithDistances swiss_roll_sample(const SwissRoll& roll, std::size_t n, RandomSeed seed);

}  // namespace geodesica::manifolds
