#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <json.hpp>

#include "orthoproj/grassmann.hpp"
#include "orthoproj/point_cloud.hpp"

namespace orthoproj {

inline constexpr int kFormatVersion = 1;

/// %.17g: round-trips every double.
std::string format_double(double value);

/// Rectangular numeric CSV. A first line with any non-numeric cell is taken as
/// a header. Ragged rows and bad cells raise parse_error with the line (and
/// column) number; `origin` names the source in messages.
Eigen::MatrixXd parse_numeric_csv(std::string_view text, std::string_view origin = "<input>");
std::string matrix_to_csv(const Eigen::MatrixXd& m);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

PointCloud read_point_cloud_csv(const std::filesystem::path& path);

// Frames and projectors: CSV is the row-major matrix; JSON is
// {"k":…, "d":…, "rows":[[…]]} where rows holds the k frame rows or the d
// projector rows respectively.
std::string frame_to_csv(const StiefelFrame& q);
StiefelFrame frame_from_csv(std::string_view text);
nlohmann::json frame_to_json(const StiefelFrame& q);
StiefelFrame frame_from_json(const nlohmann::json& j);

std::string projector_to_csv(const Projector& p);
Projector projector_from_csv(std::string_view text);
nlohmann::json projector_to_json(const Projector& p);
Projector projector_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

}  // namespace orthoproj
