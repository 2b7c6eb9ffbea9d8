#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "orthoproj/point_cloud.hpp"

namespace orthoproj {

class PairwiseGeometry;

inline constexpr double kVarianceFloor = 1e-14;

/// Population moments of (tvar(Px), M(P,x), V(P,x)) for P ~ λ_{k,d}; equally
/// for P uniform over any projector 2-design.
struct ClosedFormMoments {
  double e_tvar = 0.0;
  double e_M = 1.0;
  double e_V = 0.0;
  double var_tvar = 0.0;
  double var_M = 0.0;
  double cov_M_tvar = 0.0;
  /// Empty when either variance is below the degenerate-variance floor.
  std::optional<double> corr_M_tvar;
  double a_kd = 0.0;
};

nlohmann::json to_json(const ClosedFormMoments& m);

/// a_{k,d} = 2d(d−k) / (k(d−1)(d+2)). Throws unsupported_ambient_dimension for d = 1.
double a_kd(std::size_t k, std::size_t d);

/// Upper bound a_{k,d} on E V(P,x); tends to 2/k as d grows.
double expected_V_bound(std::size_t k, std::size_t d);

/// Σ_a Σ_b ⟨y_a, z_b⟩² over the rows of y and z.
///
/// Evaluated either as ⟨Σ y yᵀ, Σ z zᵀ⟩_F (cost ~ rows·d²) or through the
/// cross-Gram matrix y zᵀ (cost ~ rows²·d); `auto_route` picks the cheaper.
enum class PairSumRoute { auto_route, scatter, gram };
double sum_squared_inner_products(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z,
                                  PairSumRoute route = PairSumRoute::auto_route);

ClosedFormMoments closed_form_moments(const PairwiseGeometry& g, std::size_t k, double floor = kVarianceFloor,
                                      PairSumRoute route = PairSumRoute::auto_route);
ClosedFormMoments closed_form_moments(const PointCloud& x, std::size_t k, double floor = kVarianceFloor);

struct CorrelationBound {
  double value = 0.0;
  /// d ≥ m(m−1)/2, the regime where the value is a proven lower bound.
  bool hypothesis_holds = false;
};

/// ρ − (m(m−1)/(2d))/ρ with ρ = min‖x_i−x_j‖² / max‖x_i−x_j‖².
CorrelationBound correlation_lower_bound(const PairwiseGeometry& g);
CorrelationBound correlation_lower_bound(const PointCloud& x);

/// Least-squares line tvar(P x) ≈ slope · M(P,x) + intercept under λ_{k,d}.
struct LsqFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Throws undefined_fit when Var M(P,x) is below `floor` (e.g. k = d).
LsqFit lsq_fit(const PairwiseGeometry& g, std::size_t k, double floor = kVarianceFloor);
LsqFit lsq_fit(const PointCloud& x, std::size_t k, double floor = kVarianceFloor);

/// Ordinary least squares of ys on xs; used for sampled candidate sets.
LsqFit fit_line(std::span<const double> xs, std::span<const double> ys);

struct MomentIdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};

MomentIdentityReport make_report(double lhs, double rhs, double floor = 1e-300);

/// E‖Py‖² = (k/d)‖y‖².
double expected_sq_norm(const Eigen::VectorXd& y, std::size_t k);
/// E‖Py‖²‖Pz‖² = (α₁‖y‖²‖z‖² + α₂⟨y,z⟩²)/q with q = (d−1)d(d+2),
/// α₁ = (d+1)k² − 2k, α₂ = 2k(d−k).
double expected_sq_norm_product(const Eigen::VectorXd& y, const Eigen::VectorXd& z, std::size_t k);

/// Reports for one (y, z) pair and one k: first = degree-1 identity, second = degree-2.
using IdentityReports = std::pair<MomentIdentityReport, MomentIdentityReport>;

/// Monte Carlo check of both identities for every k in 1..d at once.
///
/// Each of the n_samples draws is one d×d Haar orthogonal frame; the rank-k
/// projector is spanned by its first k rows, which is a λ_{k,d} draw. The
/// result is indexed [pair][k − 1].
std::vector<std::vector<IdentityReports>> verify_moment_identity_sweep(
    std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs, std::size_t n_samples, std::uint64_t seed);

IdentityReports verify_moment_identities(const Eigen::VectorXd& y, const Eigen::VectorXd& z, std::size_t k,
                                         std::size_t n_samples, std::uint64_t seed);

}  // namespace orthoproj
