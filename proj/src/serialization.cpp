#include "orthoproj/serialization.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "orthoproj/error.hpp"

namespace orthoproj {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_cell(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Eigen::MatrixXd parse_numeric_csv(std::string_view text, std::string_view origin) {
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool first_content_line = true;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto cells = split(line, ',');
    std::vector<double> values(cells.size());
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_cell(cells[c], values[c])) {
        bad_col = c + 1;
        break;
      }
    }
    if (bad_col != 0) {
      if (first_content_line) {
        first_content_line = false;
        width = cells.size();
        continue;  // header
      }
      throw Error(ErrorCode::parse_error, std::string(origin) + ": line " + std::to_string(line_no) + ", column " +
                                              std::to_string(bad_col) + ": non-numeric cell '" +
                                              std::string(trim(cells[bad_col - 1])) + "'");
    }
    if (first_content_line) {
      first_content_line = false;
      width = values.size();
    } else if (values.size() != width) {
      throw Error(ErrorCode::parse_error, std::string(origin) + ": line " + std::to_string(line_no) + " has " +
                                              std::to_string(values.size()) + " cells, expected " +
                                              std::to_string(width));
    }
    rows.push_back(std::move(values));
    if (end == text.size()) break;
  }
  if (rows.empty()) throw Error(ErrorCode::parse_error, std::string(origin) + ": no numeric rows");

  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

PointCloud read_point_cloud_csv(const std::filesystem::path& path) {
  return PointCloud(parse_numeric_csv(read_text_file(path), path.string()));
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::parse_error, "matrix must be a nonempty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw Error(ErrorCode::parse_error, "matrix rows must be nonempty arrays");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols)
      throw Error(ErrorCode::parse_error, "matrix row " + std::to_string(r) + " has wrong length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw Error(ErrorCode::parse_error,
                    "matrix entry (" + std::to_string(r) + "," + std::to_string(c) + ") is not a number");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return out;
}

std::string frame_to_csv(const StiefelFrame& q) { return matrix_to_csv(q.rows()); }

StiefelFrame frame_from_csv(std::string_view text) { return StiefelFrame::from_rows(parse_numeric_csv(text, "frame")); }

nlohmann::json frame_to_json(const StiefelFrame& q) {
  return {{"k", q.k()}, {"d", q.d()}, {"rows", matrix_to_json(q.rows())}};
}

StiefelFrame frame_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("d") || !j.contains("rows"))
    throw Error(ErrorCode::parse_error, "frame object needs k, d and rows");
  Eigen::MatrixXd rows = matrix_from_json(j.at("rows"));
  if (static_cast<std::size_t>(rows.rows()) != j.at("k").get<std::size_t>() ||
      static_cast<std::size_t>(rows.cols()) != j.at("d").get<std::size_t>())
    throw Error(ErrorCode::parse_error, "frame rows do not match declared k×d");
  return StiefelFrame::from_rows(std::move(rows));
}

std::string projector_to_csv(const Projector& p) { return matrix_to_csv(p.matrix()); }

Projector projector_from_csv(std::string_view text) {
  return Projector::from_matrix(parse_numeric_csv(text, "projector"));
}

nlohmann::json projector_to_json(const Projector& p) {
  return {{"k", p.k()}, {"d", p.d()}, {"rows", matrix_to_json(p.matrix())}};
}

Projector projector_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("d") || !j.contains("rows"))
    throw Error(ErrorCode::parse_error, "projector object needs k, d and rows");
  Projector p = Projector::from_matrix(matrix_from_json(j.at("rows")));
  if (p.k() != j.at("k").get<std::size_t>() || p.d() != j.at("d").get<std::size_t>())
    throw Error(ErrorCode::parse_error, "projector rank/dimension do not match declared k, d");
  return p;
}

}  // namespace orthoproj
