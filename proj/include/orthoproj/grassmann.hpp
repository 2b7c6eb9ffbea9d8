#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "orthoproj/point_cloud.hpp"
#include "orthoproj/rng.hpp"

namespace orthoproj {

inline constexpr double kFrameTolerance = 1e-10;
inline constexpr double kProjectorTolerance = 1e-9;

/// k×d matrix with orthonormal rows: a point q of the Stiefel manifold V_{k,d}.
/// The projector it represents is qᵀq.
class StiefelFrame {
 public:
  /// Validates ‖q qᵀ − I_k‖_F ≤ tol and 1 ≤ k ≤ d.
  static StiefelFrame from_rows(Eigen::MatrixXd rows, double tol = kFrameTolerance);

  std::size_t k() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
  const Eigen::MatrixXd& rows() const noexcept { return rows_; }

  double orthonormality_defect() const;

  friend bool operator==(const StiefelFrame& a, const StiefelFrame& b) { return a.rows_ == b.rows_; }

 private:
  explicit StiefelFrame(Eigen::MatrixXd rows) : rows_(std::move(rows)) {}
  Eigen::MatrixXd rows_;
};

/// Dense rank-k orthogonal projector on R^d.
class Projector {
 public:
  /// Validates exact symmetry, ‖p² − p‖_F ≤ tol and |trace − k| ≤ tol for an
  /// integer k ≥ 0.
  static Projector from_matrix(Eigen::MatrixXd matrix, double tol = kProjectorTolerance);
  static Projector identity(std::size_t d);

  std::size_t k() const noexcept { return k_; }
  std::size_t d() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

  double idempotence_defect() const;

 private:
  Projector(Eigen::MatrixXd matrix, std::size_t k) : matrix_(std::move(matrix)), k_(k) {}
  Eigen::MatrixXd matrix_;
  std::size_t k_;
};

/// Haar (λ_{k,d}) draw: orthonormalize the rows of a k×d standard Gaussian
/// matrix, with the triangular factor's diagonal made positive.
///
/// Gaussian entries are consumed row-major, and Gram-Schmidt is sequential in
/// the rows, so the first j rows of haar_sample(k, d, ·) are the frame
/// haar_sample(j, d, ·) would return for the same stream position.
StiefelFrame haar_sample(std::size_t k, std::size_t d, std::uint64_t seed);
StiefelFrame haar_sample(std::size_t k, std::size_t d, Rng& rng);

/// n independent Haar frames drawn sequentially from one engine seeded with `seed`.
std::vector<StiefelFrame> haar_samples(std::size_t k, std::size_t d, std::size_t n, std::uint64_t seed);

Projector frame_to_projector(const StiefelFrame& q);

/// Frame spanning the orthogonal complement of range(qᵀq). Requires k < d.
StiefelFrame complement_frame(const StiefelFrame& q);

struct PcaResult {
  Projector projector;
  StiefelFrame frame;
  /// Covariance eigenvalues, descending.
  Eigen::VectorXd eigenvalues;
  /// False when λ_k and λ_{k+1} coincide within tolerance, so the top-k
  /// subspace is not unique.
  bool subspace_unique = true;
};

/// Projector onto the top-k eigenvectors of the sample covariance of x.
/// Throws degenerate_data when tvar(x) = 0.
PcaResult pca_projector(const PointCloud& x, std::size_t k, double tie_tol = 1e-12);

double frobenius_distance(const Projector& a, const Projector& b);

/// {x̄ + p(x_i − x̄)}.
PointCloud project_affine(const PointCloud& x, const Projector& p);

}  // namespace orthoproj
