#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "orthoproj/grassmann.hpp"
#include "orthoproj/point_cloud.hpp"

namespace orthoproj {

inline constexpr double kDistinctFloor = 1e-24;

/// (tvar(px), M(p,x), V(p,x)) for one projector on one dataset.
struct ProjectionSummary {
  double tvar = 0.0;
  /// Mean of the d/k-scaled squared distance ratios; 1 means preserved on average.
  double mean_rel_dist = 0.0;
  /// Uncorrected variance of the same ratios.
  double var_rel_dist = 0.0;
};

nlohmann::json to_json(const ProjectionSummary& s);

/// Difference vectors x_i − x_j for i < j in lexicographic order, with their
/// squared norms. Construction rejects clouds with coincident points.
class PairwiseGeometry {
 public:
  explicit PairwiseGeometry(const PointCloud& x, double distinct_floor = kDistinctFloor);

  std::size_t m() const noexcept { return m_; }
  std::size_t d() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  std::size_t pair_count() const noexcept { return static_cast<std::size_t>(diffs_.rows()); }

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  /// One row per pair.
  const Eigen::MatrixXd& differences() const noexcept { return diffs_; }
  const Eigen::VectorXd& squared_norms() const noexcept { return sq_norms_; }
  std::pair<std::size_t, std::size_t> pair(std::size_t index) const { return pairs_.at(index); }

  double min_squared_distance() const { return sq_norms_.minCoeff(); }
  double max_squared_distance() const { return sq_norms_.maxCoeff(); }

 private:
  std::size_t m_;
  Eigen::MatrixXd points_;
  Eigen::MatrixXd diffs_;
  Eigen::VectorXd sq_norms_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

/// (1/(m−1)) Σ ‖x_i − x̄‖².
double total_variance(const PointCloud& x);
/// (1/(m(m−1))) Σ_{i<j} ‖x_i − x_j‖²; equal to total_variance up to rounding.
double total_variance_pairwise(const PointCloud& x);

/// ‖p(x_i − x_j)‖² for every pair, in pair order.
Eigen::VectorXd projected_squared_distances(const PairwiseGeometry& g, const StiefelFrame& q);
Eigen::VectorXd projected_squared_distances(const PairwiseGeometry& g, const Projector& p);

/// Summary from precomputed projected squared distances of a rank-k projector.
ProjectionSummary summarize(const PairwiseGeometry& g, const Eigen::VectorXd& projected_sq, std::size_t k);
ProjectionSummary summarize(const PairwiseGeometry& g, const StiefelFrame& q);
ProjectionSummary summarize(const PairwiseGeometry& g, const Projector& p);
ProjectionSummary summarize(const PointCloud& x, const Projector& p);

/// (d/k)‖p(x_i − x_j)‖² / ‖x_i − x_j‖², pair order i ascending then j.
Eigen::VectorXd relative_distortions(const PairwiseGeometry& g, const Eigen::VectorXd& projected_sq, std::size_t k);
std::vector<double> relative_distortions(const PointCloud& x, const Projector& p);

/// True iff every distortion lies in [1−ε, 1+ε].
bool jl_satisfied(std::span<const double> distortions, double epsilon);
bool jl_satisfied(const PointCloud& x, const Projector& p, double epsilon);

/// Smallest integer k with 4 log(m) / (ε²/2 − ε³/3) ≤ k (natural log).
std::size_t jl_min_dimension(std::size_t m, double epsilon);

/// Parameters of the random-projection JL guarantee: with k ≥ k_min a Haar
/// projector satisfies all distortions with probability ≥ success_probability().
struct JLParams {
  double epsilon;
  double tau;
  std::size_t m;
  std::size_t k_min;

  /// k_min = ⌈(2+τ)·2·log(m) / (ε²/2 − ε³/3)⌉.
  static JLParams for_random_projection(std::size_t m, double epsilon, double tau);
  /// 1 − m^{−τ} + m^{−(τ+1)}.
  double success_probability() const;
};

/// δ = ε + 2ϱ√((1+ε)d/k) + (d/k)ϱ²: distortion bound guaranteed within a finite
/// projector set of covering radius ϱ.
double gjl_delta(double epsilon, double rho, std::size_t k, std::size_t d);

}  // namespace orthoproj
