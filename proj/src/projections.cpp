#include "geodesica/projections.hpp"

#include "geodesica/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace geodesica::projections {
namespace {

Projection finish(std::vector<Eigen::Vector2d> coords, std::vector<std::size_t> kept,
                  std::vector<std::size_t> dropped) {
  Projection out;
  out.config.coords.resize(static_cast<Eigen::Index>(coords.size()), 2);
  for (std::size_t k = 0; k < coords.size(); ++k) out.config.coords.row(static_cast<Eigen::Index>(k)) = coords[k].transpose();
  out.kept = std::move(kept);
  out.dropped = std::move(dropped);
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Projection equirectangular(const GeoPointSet& g) {
  std::vector<Eigen::Vector2d> coords;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < g.size(); ++i) {
    coords.emplace_back(g.points[i].lon, g.points[i].lat);
    kept.push_back(i);
  }
  return finish(std::move(coords), std::move(kept), {});
}

Projection transverse_mercator(const GeoPointSet& g, double lambda0) {
  std::vector<Eigen::Vector2d> coords;
  std::vector<std::size_t> kept, dropped;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double phi = g.points[i].lat;
    const double dl = g.points[i].lon - lambda0;
    const double b = std::cos(phi) * std::sin(dl);
    if (std::abs(b) >= 1.0) {
      dropped.push_back(i);
      continue;
    }
    if (phi == M_PI / 2 || phi == -M_PI / 2) {
      coords.emplace_back(0.0, phi);  // tan(phi) is unbounded at the poles
    } else {
      coords.emplace_back(0.5 * std::log((1.0 + b) / (1.0 - b)), std::atan2(std::tan(phi), std::cos(dl)));
    }
    kept.push_back(i);
  }
  return finish(std::move(coords), std::move(kept), std::move(dropped));
}

Projection lambert_azimuthal(const GeoPointSet& g, double lambda0) {
  std::vector<Eigen::Vector2d> coords;
  std::vector<std::size_t> kept, dropped;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double phi = g.points[i].lat;
    const double dl = g.points[i].lon - lambda0;
    const double denom = 1.0 + std::cos(phi) * std::cos(dl);
    if (denom <= 0.0) {
      dropped.push_back(i);
      continue;
    }
    const double k = std::sqrt(2.0 / denom);
    coords.emplace_back(k * std::cos(phi) * std::sin(dl), k * std::sin(phi));
    kept.push_back(i);
  }
  return finish(std::move(coords), std::move(kept), std::move(dropped));
}

MdsMap mds_map(const GeoPointSet& g, const mds::StressParams& params, std::size_t dim) {
  if (g.size() < 3) throw Error("invalid_argument", "MDS map needs at least 3 points");
  const auto sphere = manifolds::sphere_sample_and_distance(g.points);
  const auto init = mds::cmds(sphere.distances, dim);
  auto refined = mds::smacof(sphere.distances, init, params);
  MdsMap out;
  out.init_stress = refined.trace.front();
  out.final_stress = refined.trace.back();
  out.trace = std::move(refined.trace);
  out.config = std::move(refined.config);
  // Guttman steps do not preserve the CMDS sign convention; reapply it.
  for (Eigen::Index c = 0; c < out.config.coords.cols(); ++c) {
    Eigen::Index arg = 0;
    out.config.coords.col(c).cwiseAbs().maxCoeff(&arg);
    if (out.config.coords(arg, c) < 0.0) out.config.coords.col(c) *= -1.0;
  }
  return out;
}

bool in_western_hemisphere(const GeoPoint& p) {
  return p.lat >= -M_PI / 2 && p.lat <= M_PI / 2 && p.lon >= -M_PI && p.lon <= 0.0;
}

GeoPointSet load_coastline_csv(const std::filesystem::path& path, bool western_only) {
  std::ifstream in(path);
  if (!in) throw Error("missing_file", "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("format_error", "coastline file is empty");
  std::string header(trim(line));
  header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
  if (header != "lat_deg,lon_deg") throw Error("format_error", "line 1: expected header 'lat_deg,lon_deg'");
  GeoPointSet out;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    const auto view = trim(line);
    if (view.empty()) continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw Error("format_error", "line " + std::to_string(line_number) + ": expected 'lat_deg,lon_deg'");
    }
    double lat = 0.0, lon = 0.0;
    try {
      lat = io::parse_double(trim(view.substr(0, comma)));
      lon = io::parse_double(trim(view.substr(comma + 1)));
    } catch (const Error&) {
      throw Error("format_error", "line " + std::to_string(line_number) + ": malformed number");
    }
    if (!(std::abs(lat) <= 90.0) || !(std::abs(lon) <= 180.0)) {
      throw Error("format_error", "line " + std::to_string(line_number) + ": latitude/longitude out of range");
    }
    const GeoPoint p{lat * M_PI / 180.0, lon * M_PI / 180.0};
    if (western_only && !in_western_hemisphere(p)) continue;
    out.points.push_back(p);
  }
  if (out.points.empty()) throw Error("format_error", "coastline file has no usable rows");
  return out;
}

GeoPointSet synthetic_hemisphere_grid(double step_deg) {
  if (!(step_deg > 0.0)) throw Error("invalid_argument", "grid step must be positive");
  GeoPointSet out;
  const int lat_steps = static_cast<int>(std::floor(90.0 / step_deg));
  const int lon_steps = static_cast<int>(std::floor(180.0 / step_deg));
  for (int a = -lat_steps; a <= lat_steps; ++a) {
    const double lat = a * step_deg;
    if (std::abs(lat) >= 90.0) continue;
    for (int b = 0; b <= lon_steps; ++b) {
      const double lon = -180.0 + b * step_deg;
      out.points.push_back({lat * M_PI / 180.0, lon * M_PI / 180.0});
    }
  }
  return out;
}

}  // namespace geodesica::projections
