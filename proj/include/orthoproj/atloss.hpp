#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "orthoproj/grassmann.hpp"
#include "orthoproj/rng.hpp"
#include "orthoproj/transforms.hpp"

namespace orthoproj {

/// Batches hold one sample per row: m rows of length s.
using Batch = Eigen::MatrixXd;

/// Ordered transforms T_1..T_d. Row j of stack(y) is T_j(y)ᵀ.
class FeatureStack {
 public:
  FeatureStack() = default;
  explicit FeatureStack(std::vector<TransformPtr> transforms);

  std::size_t depth() const noexcept { return transforms_.size(); }
  const std::vector<TransformPtr>& transforms() const noexcept { return transforms_; }

  /// d×t matrix; all transforms must agree on t for this input.
  Eigen::MatrixXd stack(const Eigen::VectorXd& y) const;

 private:
  std::vector<TransformPtr> transforms_;
};

enum class BaseLoss { mse, cross_entropy };
enum class FeatureLoss { mse_frobenius };

struct IdentityPolicy {};
struct FixedPolicy {
  Projector projector;
};
/// One fresh Haar projector in G_{k,d} per loss/gradient evaluation.
struct ResamplePolicy {
  std::size_t k;
};
/// PCA projector of rank k over the columns of T(y_i) across the target batch.
struct PcaOnTargetsPolicy {
  std::size_t k;
};
using ProjectorPolicy = std::variant<IdentityPolicy, FixedPolicy, ResamplePolicy, PcaOnTargetsPolicy>;

struct ATLossSpec {
  BaseLoss base_loss = BaseLoss::mse;
  FeatureLoss feature_loss = FeatureLoss::mse_frobenius;
  double alpha = 0.0;
  /// Per-transform weights α_j; only meaningful with the identity policy,
  /// where they replace alpha.
  std::vector<double> alphas;
  ProjectorPolicy policy = IdentityPolicy{};
};

inline constexpr double kProbabilityFloor = 1e-12;

/// (1/m) Σ ‖y_i − ŷ_i‖², or −(1/m) Σ_i Σ_c y_ic log max(ŷ_ic, floor).
double base_loss_value(BaseLoss loss, const Batch& y, const Batch& yhat);
Batch base_loss_gradient(BaseLoss loss, const Batch& y, const Batch& yhat);

/// Resolves the projector used for one evaluation. ResamplePolicy draws from
/// `stream` and throws invalid_argument without one.
Projector resolve_projector(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y,
                            SeedStream* stream = nullptr);

/// (1/m) Σ ‖p T(y_i) − p T(ŷ_i)‖_F², weighted per row by α_j / alpha when
/// per-transform weights are set (not including the outer alpha).
double feature_term(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, const Batch& yhat,
                    const Projector& p);

/// base + α·feature term for an already resolved projector.
double loss(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, const Batch& yhat,
            const Projector& p);

/// Gradient of `loss` with respect to ŷ, batch shaped.
Batch loss_gradient(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, const Batch& yhat,
                    const Projector& p);

struct LossEvaluation {
  double value = 0.0;
  Batch gradient;
  Projector projector;
};

/// Resolves the projector once and returns the paired loss and gradient.
LossEvaluation evaluate(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, const Batch& yhat,
                        SeedStream* stream = nullptr);

/// One term α_j · L^j({T_j(y_i)}, {T_j(ŷ_i)}) of the standard augmented target loss.
struct ATTerm {
  TransformPtr transform;
  double weight = 1.0;
  BaseLoss loss = BaseLoss::mse;
};

/// Σ_j α_j · L^j over explicitly listed terms (the identity-projector form).
double standard_at_loss(const std::vector<ATTerm>& terms, const Batch& y, const Batch& yhat);

/// JSON form:
/// {"base_loss":"mse"|"cross_entropy", "feature_loss":"mse", "alpha":0.1,
///  "alphas":[…]?, "image_shape":[rows, cols]?,
///  "transforms":[{"name":"prewitt"}, {"name":"linear","matrix":[[…]]}, …],
///  "projector":{"policy":"identity"} | {"policy":"fixed","projector":{…}} |
///              {"policy":"resample","k":2,"seed":7} | {"policy":"pca_on_targets","k":2}}
struct ATLossConfig {
  ATLossSpec spec;
  FeatureStack stack;
  std::optional<std::uint64_t> seed;
  nlohmann::json transforms_json;
  std::optional<ImageShape> image_shape;
};

ATLossConfig atloss_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ATLossConfig& config);

}  // namespace orthoproj
