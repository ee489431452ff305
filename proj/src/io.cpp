#include "geodesica/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace geodesica::io {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::vector<double>> read_rows(std::istream& in, std::size_t first_line_number) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_number = first_line_number;
  while (std::getline(in, line)) {
    ++line_number;
    const auto view = trim(line);
    if (view.empty()) continue;
    std::vector<double> row;
    for (auto cell : split_commas(view)) {
      try {
        row.push_back(parse_double(trim(cell)));
      } catch (const Error&) {
        throw Error("format_error", "line " + std::to_string(line_number) + ": cannot parse '" +
                                        std::string(cell) + "' as a number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error("format_error", "line " + std::to_string(line_number) + ": expected " +
                                      std::to_string(rows.front().size()) + " columns, found " +
                                      std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing_file", "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0 as well
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "inf" || text == "+inf" || text == "Inf" || text == "infinity") return kInfinity;
  if (text == "-inf") return -kInfinity;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw Error("format_error", "cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

void write_points_csv(std::ostream& out, const Matrix& points) {
  out << "dim=" << points.cols() << '\n';
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j) out << ',';
      out << format_double(points(i, j));
    }
    out << '\n';
  }
}

Matrix read_points_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error("format_error", "empty point file");
  const auto h = trim(header);
  if (h.substr(0, 4) != "dim=") throw Error("format_error", "line 1: expected header 'dim=q'");
  long dim = 0;
  const auto body = h.substr(4);
  const auto res = std::from_chars(body.data(), body.data() + body.size(), dim);
  if (res.ec != std::errc() || res.ptr != body.data() + body.size() || dim < 1) {
    throw Error("format_error", "line 1: invalid dimension in header");
  }
  const auto rows = read_rows(in, 1);
  Matrix points(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(dim)) {
      throw Error("format_error", "line " + std::to_string(i + 2) + ": row has " +
                                      std::to_string(rows[i].size()) + " values, header says " +
                                      std::to_string(dim));
    }
    for (long j = 0; j < dim; ++j) points(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  }
  return points;
}

void write_matrix_csv(std::ostream& out, const Matrix& values) {
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  const auto rows = read_rows(in, 0);
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix values(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw Error("format_error", "line " + std::to_string(i + 1) + ": matrix is not square");
    }
    for (Eigen::Index j = 0; j < n; ++j) values(i, j) = row[static_cast<std::size_t>(j)];
  }
  return values;
}

void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  write_points_csv(out, cloud.points);
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  auto in = open_in(path);
  PointCloud cloud;
  cloud.points = read_points_csv(in);
  if (cloud.points.rows() == 0) throw Error("format_error", "'" + path.string() + "' holds no points");
  return cloud;
}

void save_configuration(const std::filesystem::path& path, const Configuration& config) {
  auto out = open_out(path);
  write_points_csv(out, config.coords);
}

Configuration load_configuration(const std::filesystem::path& path) {
  auto in = open_in(path);
  return Configuration{read_points_csv(in)};
}

void save_dissimilarity(const std::filesystem::path& path, const DissimilarityMatrix& delta) {
  auto out = open_out(path);
  write_matrix_csv(out, delta.matrix());
}

DissimilarityMatrix load_dissimilarity(const std::filesystem::path& path, bool allow_infinite) {
  auto in = open_in(path);
  return DissimilarityMatrix::from_matrix(read_matrix_csv(in), allow_infinite);
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  auto out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("io_error", "SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

}  // namespace geodesica::io
