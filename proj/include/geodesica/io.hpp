#pragma once

#include "geodesica/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace geodesica::io {

// 17 significant digits: a file reloaded by a later stage reproduces the
// in-memory values bit for bit.
std::string format_double(double value);
double parse_double(std::string_view text);  // accepts "inf"

// PointCloud / Configuration CSV: header `dim=q`, then one row per point.
void write_points_csv(std::ostream& out, const Matrix& points);
Matrix read_points_csv(std::istream& in);

// DissimilarityMatrix CSV: headerless n x n, "inf" for infinite entries.
void write_matrix_csv(std::ostream& out, const Matrix& values);
Matrix read_matrix_csv(std::istream& in);

void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud load_point_cloud(const std::filesystem::path& path);
void save_configuration(const std::filesystem::path& path, const Configuration& config);
Configuration load_configuration(const std::filesystem::path& path);
void save_dissimilarity(const std::filesystem::path& path, const DissimilarityMatrix& delta);
DissimilarityMatrix load_dissimilarity(const std::filesystem::path& path, bool allow_infinite = false);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

}  // namespace geodesica::io
