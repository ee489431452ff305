#include "geodesica/svg.hpp"

#include "geodesica/io.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace geodesica::svg {
namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return io::format_double(v); }

}  // namespace

std::string emit_svg_scatter(const Configuration& config, const ScatterStyle& style) {
  if (config.dim() != 2) throw Error("invalid_dimension", "scatter plots need a 2-dimensional configuration");
  if (!style.labels.empty() && style.labels.size() != config.size()) {
    throw Error("shape_mismatch", "label count differs from point count");
  }
  const Matrix& Z = config.coords;
  double x_min = -1.0, x_max = 1.0, y_min = -1.0, y_max = 1.0;
  if (config.size() > 0) {
    x_min = Z.col(0).minCoeff();
    x_max = Z.col(0).maxCoeff();
    y_min = Z.col(1).minCoeff();
    y_max = Z.col(1).maxCoeff();
  }
  double w = x_max - x_min;
  double h = y_max - y_min;
  // A degenerate extent gets a unit box around the data.
  if (w <= 0.0) { x_min -= 0.5; x_max += 0.5; w = 1.0; }
  if (h <= 0.0) { y_min -= 0.5; y_max += 0.5; h = 1.0; }
  const double vx = x_min - 0.05 * w;
  const double vy = -(y_max + 0.05 * h);  // SVG y grows downward
  const double vw = 1.1 * w;
  const double vh = 1.1 * h;
  const double r = style.point_radius * std::max(w, h);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(style.width) << "\" height=\""
      << num(style.width * vh / vw) << "\" viewBox=\"" << num(vx) << ' ' << num(vy) << ' ' << num(vw) << ' '
      << num(vh) << "\">\n";
  if (!style.title.empty()) out << "<title>" << escape(style.title) << "</title>\n";
  out << "<g stroke=\"none\">\n";
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    std::string fill = style.color;
    if (!style.labels.empty()) {
      const int label = style.labels[static_cast<std::size_t>(i)];
      fill = kPalette[static_cast<std::size_t>(label < 0 ? -label : label) % kPalette.size()];
    }
    out << "<circle cx=\"" << num(Z(i, 0)) << "\" cy=\"" << num(-Z(i, 1)) << "\" r=\"" << num(r) << "\" fill=\""
        << escape(fill) << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace geodesica::svg
