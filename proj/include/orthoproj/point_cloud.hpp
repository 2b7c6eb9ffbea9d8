#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace orthoproj {

/// A sample x = {x_i} of m points in R^d, stored one point per row.
class PointCloud {
 public:
  /// Throws invalid_dimension if fewer than two points or zero columns.
  explicit PointCloud(Eigen::MatrixXd points);

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  Eigen::VectorXd mean() const;
  Eigen::MatrixXd centered() const;

  /// Smallest squared distance over all pairs i < j.
  double min_pairwise_sq_distance() const;

  /// Copy keeping the first occurrence of every exactly repeated row.
  PointCloud without_duplicates() const;

  PointCloud scaled(double factor) const;

 private:
  Eigen::MatrixXd points_;
};

}  // namespace orthoproj
