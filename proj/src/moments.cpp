#include "orthoproj/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orthoproj/error.hpp"
#include "orthoproj/grassmann.hpp"
#include "orthoproj/objectives.hpp"

namespace orthoproj {

namespace {

void check_rank(std::size_t k, std::size_t d) {
  if (d < 2)
    throw Error(ErrorCode::unsupported_ambient_dimension, "closed forms need d >= 2 (a_{k,d} divides by d-1)");
  if (k == 0 || k > d)
    throw Error(ErrorCode::invalid_dimension,
                "need 1 <= k <= d, got k=" + std::to_string(k) + ", d=" + std::to_string(d));
}

double gram_route(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z) {
  constexpr Eigen::Index kBlock = 512;
  double total = 0.0;
  for (Eigen::Index start = 0; start < y.rows(); start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, y.rows() - start);
    total += (y.middleRows(start, rows) * z.transpose()).squaredNorm();
  }
  return total;
}

double scatter_route(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z) {
  const Eigen::MatrixXd sy = y.transpose() * y;
  const Eigen::MatrixXd sz = z.transpose() * z;
  return sy.cwiseProduct(sz).sum();
}

}  // namespace

nlohmann::json to_json(const ClosedFormMoments& m) {
  nlohmann::json j = {{"e_tvar", m.e_tvar},         {"e_M", m.e_M},     {"e_V", m.e_V},
                      {"var_tvar", m.var_tvar},     {"var_M", m.var_M}, {"cov_M_tvar", m.cov_M_tvar},
                      {"corr_M_tvar", nullptr},     {"a_kd", m.a_kd}};
  if (m.corr_M_tvar) j["corr_M_tvar"] = *m.corr_M_tvar;
  return j;
}

double a_kd(std::size_t k, std::size_t d) {
  check_rank(k, d);
  const auto kd = static_cast<double>(k);
  const auto dd = static_cast<double>(d);
  return 2.0 * dd * (dd - kd) / (kd * (dd - 1.0) * (dd + 2.0));
}

double expected_V_bound(std::size_t k, std::size_t d) { return a_kd(k, d); }

double sum_squared_inner_products(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z, PairSumRoute route) {
  if (y.cols() != z.cols()) throw Error(ErrorCode::dimension_mismatch, "row vectors must share a dimension");
  if (route == PairSumRoute::auto_route) {
    const double d = static_cast<double>(y.cols());
    const double scatter_cost = static_cast<double>(y.rows() + z.rows()) * d * d;
    const double gram_cost = static_cast<double>(y.rows()) * static_cast<double>(z.rows()) * d;
    route = scatter_cost <= gram_cost ? PairSumRoute::scatter : PairSumRoute::gram;
  }
  return route == PairSumRoute::scatter ? scatter_route(y, z) : gram_route(y, z);
}

ClosedFormMoments closed_form_moments(const PairwiseGeometry& g, std::size_t k, double floor, PairSumRoute route) {
  const std::size_t d = g.d();
  check_rank(k, d);
  const auto kd = static_cast<double>(k);
  const auto dd = static_cast<double>(d);
  const auto pairs = static_cast<double>(g.pair_count());
  const auto m = static_cast<double>(g.m());

  const Eigen::MatrixXd& v = g.differences();
  const Eigen::MatrixXd u = g.squared_norms().cwiseSqrt().cwiseInverse().asDiagonal() * v;

  const double s_vv = sum_squared_inner_products(v, v, route);
  const double s_vu = sum_squared_inner_products(v, u, route);
  const double s_uu = sum_squared_inner_products(u, u, route);
  const double mean_sq = g.squared_norms().mean();
  const double tvar_x = g.squared_norms().sum() / (m * (m - 1.0));

  ClosedFormMoments out;
  out.a_kd = a_kd(k, d);
  const double a = out.a_kd;
  const double inv_pairs_sq = 1.0 / (pairs * pairs);

  out.e_tvar = kd / dd * tvar_x;
  out.e_M = 1.0;
  out.e_V = a * (1.0 - s_uu * inv_pairs_sq);
  out.cov_M_tvar = kd / (2.0 * dd) * (a * s_vu * inv_pairs_sq - a / dd * mean_sq);
  out.var_tvar = kd * kd / (4.0 * dd * dd) * (a * s_vv * inv_pairs_sq - a / dd * mean_sq * mean_sq);
  out.var_M = a * s_uu * inv_pairs_sq - a / dd;
  // Cancellation can leave tiny negative residues where the exact value is 0.
  out.var_tvar = std::max(out.var_tvar, 0.0);
  out.var_M = std::max(out.var_M, 0.0);
  out.e_V = std::max(out.e_V, 0.0);
  if (out.var_M >= floor && out.var_tvar >= floor)
    out.corr_M_tvar = std::clamp(out.cov_M_tvar / std::sqrt(out.var_M * out.var_tvar), -1.0, 1.0);
  return out;
}

ClosedFormMoments closed_form_moments(const PointCloud& x, std::size_t k, double floor) {
  check_rank(k, x.dim());
  return closed_form_moments(PairwiseGeometry(x), k, floor);
}

CorrelationBound correlation_lower_bound(const PairwiseGeometry& g) {
  const double ratio = g.min_squared_distance() / g.max_squared_distance();
  const auto pairs = static_cast<double>(g.pair_count());
  const auto d = static_cast<double>(g.d());
  return CorrelationBound{ratio - pairs / d / ratio, d >= pairs};
}

CorrelationBound correlation_lower_bound(const PointCloud& x) { return correlation_lower_bound(PairwiseGeometry(x)); }

LsqFit lsq_fit(const PairwiseGeometry& g, std::size_t k, double floor) {
  const ClosedFormMoments mom = closed_form_moments(g, k, floor);
  if (!(mom.var_M >= floor))
    throw Error(ErrorCode::undefined_fit, "Var M(P,x) = " + std::to_string(mom.var_M) + " is below the floor");
  const double slope = mom.cov_M_tvar / mom.var_M;
  return LsqFit{slope, mom.e_tvar - slope};
}

LsqFit lsq_fit(const PointCloud& x, std::size_t k, double floor) {
  check_rank(k, x.dim());
  return lsq_fit(PairwiseGeometry(x), k, floor);
}

LsqFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error(ErrorCode::invalid_argument, "line fit needs two equally sized samples of length >= 2");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::undefined_fit, "regressor has zero variance");
  const double slope = sxy / sxx;
  return LsqFit{slope, my - slope * mx};
}

MomentIdentityReport make_report(double lhs, double rhs, double floor) {
  return MomentIdentityReport{lhs, rhs, std::abs(lhs - rhs) / std::max(std::abs(rhs), floor)};
}

double expected_sq_norm(const Eigen::VectorXd& y, std::size_t k) {
  const auto d = static_cast<std::size_t>(y.size());
  if (k == 0 || k > d) throw Error(ErrorCode::invalid_dimension, "need 1 <= k <= d");
  return static_cast<double>(k) / static_cast<double>(d) * y.squaredNorm();
}

double expected_sq_norm_product(const Eigen::VectorXd& y, const Eigen::VectorXd& z, std::size_t k) {
  if (y.size() != z.size()) throw Error(ErrorCode::dimension_mismatch, "y and z must share a dimension");
  const auto d = static_cast<std::size_t>(y.size());
  check_rank(k, d);
  const auto kd = static_cast<double>(k);
  const auto dd = static_cast<double>(d);
  const double q = (dd - 1.0) * dd * (dd + 2.0);
  const double alpha1 = (dd + 1.0) * kd * kd - 2.0 * kd;
  const double alpha2 = 2.0 * kd * (dd - kd);
  const double inner = y.dot(z);
  return (alpha1 * y.squaredNorm() * z.squaredNorm() + alpha2 * inner * inner) / q;
}

std::vector<std::vector<IdentityReports>> verify_moment_identity_sweep(
    std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs, std::size_t n_samples, std::uint64_t seed) {
  if (pairs.empty()) throw Error(ErrorCode::invalid_argument, "no (y, z) pairs given");
  if (n_samples == 0) throw Error(ErrorCode::invalid_argument, "n_samples must be positive");
  const auto d = static_cast<std::size_t>(pairs.front().first.size());
  check_rank(1, d);
  for (const auto& [y, z] : pairs) {
    if (static_cast<std::size_t>(y.size()) != d || static_cast<std::size_t>(z.size()) != d)
      throw Error(ErrorCode::dimension_mismatch, "all vectors must share dimension d");
    if (y.squaredNorm() == 0.0 || z.squaredNorm() == 0.0)
      throw Error(ErrorCode::invalid_argument, "identity checks need nonzero vectors");
  }

  const std::size_t np = pairs.size();
  std::vector<double> sum1(np * d, 0.0);
  std::vector<double> sum2(np * d, 0.0);
  Rng rng = make_rng(seed);
  Eigen::VectorXd cy(static_cast<Eigen::Index>(d));
  Eigen::VectorXd cz(static_cast<Eigen::Index>(d));
  for (std::size_t s = 0; s < n_samples; ++s) {
    const StiefelFrame frame = haar_sample(d, d, rng);
    for (std::size_t p = 0; p < np; ++p) {
      cy.noalias() = frame.rows() * pairs[p].first;
      cz.noalias() = frame.rows() * pairs[p].second;
      double py = 0.0, pz = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        py += cy(static_cast<Eigen::Index>(k)) * cy(static_cast<Eigen::Index>(k));
        pz += cz(static_cast<Eigen::Index>(k)) * cz(static_cast<Eigen::Index>(k));
        sum1[p * d + k] += py;
        sum2[p * d + k] += py * pz;
      }
    }
  }

  const auto n = static_cast<double>(n_samples);
  std::vector<std::vector<IdentityReports>> out(np);
  for (std::size_t p = 0; p < np; ++p) {
    out[p].reserve(d);
    for (std::size_t k = 1; k <= d; ++k) {
      const auto& [y, z] = pairs[p];
      out[p].emplace_back(make_report(sum1[p * d + k - 1] / n, expected_sq_norm(y, k)),
                          make_report(sum2[p * d + k - 1] / n, expected_sq_norm_product(y, z, k)));
    }
  }
  return out;
}

IdentityReports verify_moment_identities(const Eigen::VectorXd& y, const Eigen::VectorXd& z, std::size_t k,
                                         std::size_t n_samples, std::uint64_t seed) {
  const auto d = static_cast<std::size_t>(y.size());
  if (k == 0 || k > d) throw Error(ErrorCode::invalid_dimension, "need 1 <= k <= d");
  const std::pair<Eigen::VectorXd, Eigen::VectorXd> pair{y, z};
  return verify_moment_identity_sweep(std::span(&pair, 1), n_samples, seed).front()[k - 1];
}

}  // namespace orthoproj
