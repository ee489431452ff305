#pragma once

#include "geodesica/core.hpp"
#include "geodesica/manifolds.hpp"
#include "geodesica/mds.hpp"

#include <filesystem>
#include <vector>

namespace geodesica::projections {

using manifolds::GeoPoint;

// Unit-sphere coordinates (R = 1).
struct GeoPointSet {
  std::vector<GeoPoint> points;

  std::size_t size() const { return points.size(); }
};

// Projected coordinates for the points that could be mapped; singular points
// are listed in `dropped` and absent from `coords`.
struct Projection {
  Configuration config;
  std::vector<std::size_t> kept;
  std::vector<std::size_t> dropped;
};

// z = (lambda, phi)
Projection equirectangular(const GeoPointSet& g);

// x = 1/2 log((1 + B) / (1 - B)), B = cos(phi) sin(lambda - lambda0);
// y = atan2(tan(phi), cos(lambda - lambda0)), the two-argument form keeping
// the central meridian continuous. Points with |B| = 1 are dropped.
Projection transverse_mercator(const GeoPointSet& g, double lambda0);

// Azimuthal equal-area centered at (0, lambda0); the antipode of the center is dropped.
Projection lambert_azimuthal(const GeoPointSet& g, double lambda0);

struct MdsMap {
  Configuration config;
  double init_stress = 0.0;   // stress of the CMDS start
  double final_stress = 0.0;
  std::vector<double> trace;
};

// Great-circle dissimilarities embedded by CMDS and refined by Guttman
// iterations.
MdsMap mds_map(const GeoPointSet& g, const mds::StressParams& params, std::size_t dim = 2);

// Western Hemisphere box: phi in [-pi/2, pi/2], lambda in [-pi, 0].
bool in_western_hemisphere(const GeoPoint& p);

// CSV with header `lat_deg,lon_deg`; degrees converted to radians.
GeoPointSet load_coastline_csv(const std::filesystem::path& path, bool western_only = false);

// Synthetic stand-in for coastline data: a latitude/longitude grid over the
// Western Hemisphere with the given spacing in degrees, poles excluded.
GeoPointSet synthetic_hemisphere_grid(double step_deg);

}  // namespace geodesica::projections
