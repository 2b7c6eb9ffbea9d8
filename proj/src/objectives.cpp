#include "orthoproj/objectives.hpp"

#include <cmath>
#include <string>

#include "orthoproj/error.hpp"

namespace orthoproj {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorCode::invalid_argument, "epsilon must lie in (0,1), got " + std::to_string(epsilon));
}

double jl_denominator(double epsilon) { return epsilon * epsilon / 2.0 - epsilon * epsilon * epsilon / 3.0; }

Eigen::VectorXd pairwise_sq_from_images(const PairwiseGeometry& g, const Eigen::MatrixXd& images) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(g.pair_count()));
  for (std::size_t a = 0; a < g.pair_count(); ++a) {
    const auto [i, j] = g.pair(a);
    out(static_cast<Eigen::Index>(a)) =
        (images.row(static_cast<Eigen::Index>(i)) - images.row(static_cast<Eigen::Index>(j))).squaredNorm();
  }
  return out;
}

void check_same_dim(std::size_t data_d, std::size_t proj_d) {
  if (data_d != proj_d)
    throw Error(ErrorCode::dimension_mismatch,
                "data dimension " + std::to_string(data_d) + " vs projector dimension " + std::to_string(proj_d));
}

}  // namespace

nlohmann::json to_json(const ProjectionSummary& s) {
  return {{"tvar", s.tvar}, {"M", s.mean_rel_dist}, {"V", s.var_rel_dist}};
}

PairwiseGeometry::PairwiseGeometry(const PointCloud& x, double distinct_floor)
    : m_(x.size()), points_(x.points()) {
  const std::size_t count = m_ * (m_ - 1) / 2;
  diffs_.resize(static_cast<Eigen::Index>(count), points_.cols());
  sq_norms_.resize(static_cast<Eigen::Index>(count));
  pairs_.reserve(count);
  Eigen::Index a = 0;
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t j = i + 1; j < m_; ++j, ++a) {
      diffs_.row(a) = points_.row(static_cast<Eigen::Index>(i)) - points_.row(static_cast<Eigen::Index>(j));
      sq_norms_(a) = diffs_.row(a).squaredNorm();
      if (!(sq_norms_(a) > distinct_floor))
        throw Error(ErrorCode::coincident_points, "points " + std::to_string(i) + " and " + std::to_string(j) +
                                                      " coincide; distinct points are required");
      pairs_.emplace_back(i, j);
    }
  }
}

double total_variance(const PointCloud& x) {
  return x.centered().squaredNorm() / static_cast<double>(x.size() - 1);
}

double total_variance_pairwise(const PointCloud& x) {
  const auto& pts = x.points();
  const Eigen::Index m = pts.rows();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) sum += (pts.row(i) - pts.row(j)).squaredNorm();
  return sum / static_cast<double>(m * (m - 1));
}

Eigen::VectorXd projected_squared_distances(const PairwiseGeometry& g, const StiefelFrame& q) {
  check_same_dim(g.d(), q.d());
  return pairwise_sq_from_images(g, g.points() * q.rows().transpose());
}

Eigen::VectorXd projected_squared_distances(const PairwiseGeometry& g, const Projector& p) {
  check_same_dim(g.d(), p.d());
  return pairwise_sq_from_images(g, g.points() * p.matrix());
}

ProjectionSummary summarize(const PairwiseGeometry& g, const Eigen::VectorXd& projected_sq, std::size_t k) {
  if (static_cast<std::size_t>(projected_sq.size()) != g.pair_count())
    throw Error(ErrorCode::dimension_mismatch, "projected distance count does not match pair count");
  if (k == 0 || k > g.d()) throw Error(ErrorCode::invalid_dimension, "rank must satisfy 1 <= k <= d");
  const double scale = static_cast<double>(g.d()) / static_cast<double>(k);
  const auto pairs = static_cast<double>(g.pair_count());
  const auto m = static_cast<double>(g.m());

  double ratio_sum = 0.0;
  double ratio_sq_sum = 0.0;
  for (Eigen::Index a = 0; a < projected_sq.size(); ++a) {
    const double r = scale * projected_sq(a) / g.squared_norms()(a);
    ratio_sum += r;
    ratio_sq_sum += r * r;
  }
  ProjectionSummary s;
  s.tvar = projected_sq.sum() / (m * (m - 1.0));
  s.mean_rel_dist = ratio_sum / pairs;
  s.var_rel_dist = std::max(0.0, ratio_sq_sum / pairs - s.mean_rel_dist * s.mean_rel_dist);
  return s;
}

ProjectionSummary summarize(const PairwiseGeometry& g, const StiefelFrame& q) {
  return summarize(g, projected_squared_distances(g, q), q.k());
}

ProjectionSummary summarize(const PairwiseGeometry& g, const Projector& p) {
  return summarize(g, projected_squared_distances(g, p), p.k());
}

ProjectionSummary summarize(const PointCloud& x, const Projector& p) {
  check_same_dim(x.dim(), p.d());
  return summarize(PairwiseGeometry(x), p);
}

Eigen::VectorXd relative_distortions(const PairwiseGeometry& g, const Eigen::VectorXd& projected_sq, std::size_t k) {
  if (static_cast<std::size_t>(projected_sq.size()) != g.pair_count())
    throw Error(ErrorCode::dimension_mismatch, "projected distance count does not match pair count");
  if (k == 0 || k > g.d()) throw Error(ErrorCode::invalid_dimension, "rank must satisfy 1 <= k <= d");
  const double scale = static_cast<double>(g.d()) / static_cast<double>(k);
  return scale * projected_sq.cwiseQuotient(g.squared_norms());
}

std::vector<double> relative_distortions(const PointCloud& x, const Projector& p) {
  check_same_dim(x.dim(), p.d());
  const PairwiseGeometry g(x);
  if (p.k() == 0) throw Error(ErrorCode::invalid_dimension, "rank-0 projector has no distortion ratios");
  const Eigen::VectorXd r = relative_distortions(g, projected_squared_distances(g, p), p.k());
  return {r.data(), r.data() + r.size()};
}

bool jl_satisfied(std::span<const double> distortions, double epsilon) {
  check_epsilon(epsilon);
  for (double r : distortions)
    if (r < 1.0 - epsilon || r > 1.0 + epsilon) return false;
  return true;
}

bool jl_satisfied(const PointCloud& x, const Projector& p, double epsilon) {
  check_epsilon(epsilon);
  return jl_satisfied(relative_distortions(x, p), epsilon);
}

std::size_t jl_min_dimension(std::size_t m, double epsilon) {
  check_epsilon(epsilon);
  if (m < 2) throw Error(ErrorCode::invalid_argument, "m must be at least 2");
  return static_cast<std::size_t>(std::ceil(4.0 * std::log(static_cast<double>(m)) / jl_denominator(epsilon)));
}

JLParams JLParams::for_random_projection(std::size_t m, double epsilon, double tau) {
  check_epsilon(epsilon);
  if (m < 2) throw Error(ErrorCode::invalid_argument, "m must be at least 2");
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_argument, "tau must be positive");
  const double bound = (2.0 + tau) * 2.0 * std::log(static_cast<double>(m)) / jl_denominator(epsilon);
  return JLParams{epsilon, tau, m, static_cast<std::size_t>(std::ceil(bound))};
}

double JLParams::success_probability() const {
  const auto md = static_cast<double>(m);
  return 1.0 - std::pow(md, -tau) + std::pow(md, -(tau + 1.0));
}

double gjl_delta(double epsilon, double rho, std::size_t k, std::size_t d) {
  check_epsilon(epsilon);
  if (!(rho >= 0.0)) throw Error(ErrorCode::invalid_argument, "covering radius must be nonnegative");
  if (k == 0 || k > d) throw Error(ErrorCode::invalid_dimension, "need 1 <= k <= d");
  const double ratio = static_cast<double>(d) / static_cast<double>(k);
  return epsilon + 2.0 * rho * std::sqrt((1.0 + epsilon) * ratio) + ratio * rho * rho;
}

}  // namespace orthoproj
