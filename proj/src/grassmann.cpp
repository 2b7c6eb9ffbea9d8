#include "orthoproj/grassmann.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "orthoproj/error.hpp"

namespace orthoproj {

namespace {

void check_dims(std::size_t k, std::size_t d) {
  if (k == 0 || k > d)
    throw Error(ErrorCode::invalid_dimension,
                "need 1 <= k <= d, got k=" + std::to_string(k) + ", d=" + std::to_string(d));
}

// Thin Q of a (d×k, k ≤ d) matrix with R's diagonal made positive, so the
// factorization matches Gram-Schmidt on the columns.
Eigen::MatrixXd positive_thin_q(const Eigen::MatrixXd& a) {
  const Eigen::Index d = a.rows();
  const Eigen::Index k = a.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
  const auto& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace

StiefelFrame StiefelFrame::from_rows(Eigen::MatrixXd rows, double tol) {
  check_dims(static_cast<std::size_t>(rows.rows()), static_cast<std::size_t>(rows.cols()));
  StiefelFrame frame(std::move(rows));
  const double defect = frame.orthonormality_defect();
  if (!(defect <= tol))
    throw Error(ErrorCode::invariant_violation,
                "frame rows are not orthonormal: ||q q^T - I||_F = " + std::to_string(defect));
  return frame;
}

double StiefelFrame::orthonormality_defect() const {
  const Eigen::Index k = rows_.rows();
  return (rows_ * rows_.transpose() - Eigen::MatrixXd::Identity(k, k)).norm();
}

Projector Projector::from_matrix(Eigen::MatrixXd matrix, double tol) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw Error(ErrorCode::invalid_dimension, "projector matrix must be square and nonempty");
  if (matrix != matrix.transpose()) throw Error(ErrorCode::invariant_violation, "projector matrix is not symmetric");
  const double trace = matrix.trace();
  const double k = std::round(trace);
  if (!(std::abs(trace - k) <= tol) || k < 0.0)
    throw Error(ErrorCode::invariant_violation, "projector trace is not an integer rank: " + std::to_string(trace));
  Projector p(std::move(matrix), static_cast<std::size_t>(k));
  const double defect = p.idempotence_defect();
  if (!(defect <= tol))
    throw Error(ErrorCode::invariant_violation, "projector is not idempotent: ||p^2 - p||_F = " + std::to_string(defect));
  return p;
}

Projector Projector::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return Projector(Eigen::MatrixXd::Identity(n, n), d);
}

double Projector::idempotence_defect() const { return (matrix_ * matrix_ - matrix_).norm(); }

StiefelFrame haar_sample(std::size_t k, std::size_t d, Rng& rng) {
  check_dims(k, d);
  Eigen::MatrixXd gaussian(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  fill_standard_normal(rng, gaussian);
  return StiefelFrame::from_rows(positive_thin_q(gaussian.transpose()).transpose());
}

StiefelFrame haar_sample(std::size_t k, std::size_t d, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return haar_sample(k, d, rng);
}

std::vector<StiefelFrame> haar_samples(std::size_t k, std::size_t d, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<StiefelFrame> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(haar_sample(k, d, rng));
  return out;
}

Projector frame_to_projector(const StiefelFrame& q) {
  Eigen::MatrixXd p = q.rows().transpose() * q.rows();
  // Bitwise symmetric regardless of the product kernel's summation order.
  Eigen::MatrixXd sym = 0.5 * (p + p.transpose());
  return Projector::from_matrix(std::move(sym));
}

StiefelFrame complement_frame(const StiefelFrame& q) {
  const auto k = static_cast<Eigen::Index>(q.k());
  const auto d = static_cast<Eigen::Index>(q.d());
  if (k >= d) throw Error(ErrorCode::invalid_dimension, "full-rank frame has no complement");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q.rows().transpose());
  Eigen::MatrixXd full = qr.householderQ();
  return StiefelFrame::from_rows(full.rightCols(d - k).transpose());
}

PcaResult pca_projector(const PointCloud& x, std::size_t k, double tie_tol) {
  const std::size_t d = x.dim();
  check_dims(k, d);
  const Eigen::MatrixXd centered = x.centered();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.size() - 1);
  if (!(cov.trace() > 0.0)) throw Error(ErrorCode::degenerate_data, "total variance is zero; PCA subspace undefined");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd ascending = eig.eigenvalues();
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::VectorXd values(n);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(k), n);
  for (Eigen::Index i = 0; i < n; ++i) values(i) = ascending(n - 1 - i);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) {
    Eigen::VectorXd v = eig.eigenvectors().col(n - 1 - i);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(v(j)) > 1e-14) {
        if (v(j) < 0.0) v = -v;
        break;
      }
    }
    rows.row(i) = v.transpose();
  }

  bool unique = true;
  if (k < d) {
    const double gap = values(static_cast<Eigen::Index>(k) - 1) - values(static_cast<Eigen::Index>(k));
    unique = gap > tie_tol * std::max(values(0), 1e-300);
  }
  StiefelFrame frame = StiefelFrame::from_rows(std::move(rows));
  Projector p = frame_to_projector(frame);
  return PcaResult{std::move(p), std::move(frame), std::move(values), unique};
}

double frobenius_distance(const Projector& a, const Projector& b) {
  if (a.d() != b.d())
    throw Error(ErrorCode::dimension_mismatch,
                "projector dimensions differ: " + std::to_string(a.d()) + " vs " + std::to_string(b.d()));
  return (a.matrix() - b.matrix()).norm();
}

PointCloud project_affine(const PointCloud& x, const Projector& p) {
  if (x.dim() != p.d())
    throw Error(ErrorCode::dimension_mismatch,
                "cloud dimension " + std::to_string(x.dim()) + " vs projector dimension " + std::to_string(p.d()));
  const Eigen::RowVectorXd mean = x.points().colwise().mean();
  Eigen::MatrixXd centered = x.points().rowwise() - mean;
  Eigen::MatrixXd out = (centered * p.matrix()).rowwise() + mean;
  return PointCloud(std::move(out));
}

}  // namespace orthoproj
