#include "orthoproj/point_cloud.hpp"

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "orthoproj/error.hpp"

namespace orthoproj {

PointCloud::PointCloud(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 2)
    throw Error(ErrorCode::invalid_dimension,
                "point cloud needs at least 2 points, got " + std::to_string(points_.rows()));
  if (points_.cols() < 1) throw Error(ErrorCode::invalid_dimension, "point cloud has zero dimensions");
}

Eigen::VectorXd PointCloud::mean() const { return points_.colwise().mean().transpose(); }

Eigen::MatrixXd PointCloud::centered() const { return points_.rowwise() - points_.colwise().mean(); }

double PointCloud::min_pairwise_sq_distance() const {
  double best = std::numeric_limits<double>::infinity();
  const Eigen::Index m = points_.rows();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      best = std::min(best, (points_.row(i) - points_.row(j)).squaredNorm());
  return best;
}

PointCloud PointCloud::without_duplicates() const {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    bool seen = false;
    for (Eigen::Index j : keep) {
      if (points_.row(i) == points_.row(j)) {
        seen = true;
        break;
      }
    }
    if (!seen) keep.push_back(i);
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), points_.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = points_.row(keep[r]);
  return PointCloud(std::move(out));
}

PointCloud PointCloud::scaled(double factor) const { return PointCloud(points_ * factor); }

}  // namespace orthoproj
