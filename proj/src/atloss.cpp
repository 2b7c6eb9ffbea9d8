#include "orthoproj/atloss.hpp"

#include <cmath>
#include <string>

#include "orthoproj/error.hpp"
#include "orthoproj/point_cloud.hpp"
#include "orthoproj/serialization.hpp"

namespace orthoproj {

namespace {

void check_batches(const Batch& y, const Batch& yhat) {
  if (y.rows() != yhat.rows() || y.cols() != yhat.cols())
    throw Error(ErrorCode::dimension_mismatch, "target batch is " + std::to_string(y.rows()) + "x" +
                                                   std::to_string(y.cols()) + ", output batch is " +
                                                   std::to_string(yhat.rows()) + "x" + std::to_string(yhat.cols()));
  if (y.rows() == 0) throw Error(ErrorCode::invalid_argument, "empty batch");
}

void check_spec(const ATLossSpec& spec, const FeatureStack& stack) {
  if (!(spec.alpha >= 0.0)) throw Error(ErrorCode::invalid_argument, "alpha must be nonnegative");
  if (!spec.alphas.empty()) {
    if (!std::holds_alternative<IdentityPolicy>(spec.policy))
      throw Error(ErrorCode::invalid_argument, "per-transform weights require the identity projector policy");
    if (spec.alphas.size() != stack.depth())
      throw Error(ErrorCode::dimension_mismatch, "got " + std::to_string(spec.alphas.size()) + " weights for " +
                                                     std::to_string(stack.depth()) + " transforms");
    for (double a : spec.alphas)
      if (!(a >= 0.0)) throw Error(ErrorCode::invalid_argument, "per-transform weights must be nonnegative");
  } else if (spec.alpha > 0.0 && stack.depth() == 0) {
    throw Error(ErrorCode::invalid_argument, "alpha > 0 needs at least one feature transform");
  }
}

bool uses_identity(const ATLossSpec& spec) { return std::holds_alternative<IdentityPolicy>(spec.policy); }

// Outer weight on the feature term and per-row weights inside it.
double outer_weight(const ATLossSpec& spec) { return spec.alphas.empty() ? spec.alpha : 1.0; }
double row_weight(const ATLossSpec& spec, std::size_t j) { return spec.alphas.empty() ? 1.0 : spec.alphas[j]; }

void check_projector(const Projector& p, const FeatureStack& stack) {
  if (p.d() != stack.depth())
    throw Error(ErrorCode::dimension_mismatch, "projector acts on R^" + std::to_string(p.d()) + " but the stack has " +
                                                   std::to_string(stack.depth()) + " transforms");
}

}  // namespace

FeatureStack::FeatureStack(std::vector<TransformPtr> transforms) : transforms_(std::move(transforms)) {
  for (const auto& t : transforms_)
    if (!t) throw Error(ErrorCode::invalid_argument, "null transform in feature stack");
}

Eigen::MatrixXd FeatureStack::stack(const Eigen::VectorXd& y) const {
  if (transforms_.empty()) return Eigen::MatrixXd(0, 0);
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(transforms_.size());
  for (const auto& t : transforms_) rows.push_back(t->forward(y));
  const Eigen::Index width = rows.front().size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != width)
      throw Error(ErrorCode::dimension_mismatch, "transform " + transforms_[j]->name() + " outputs " +
                                                     std::to_string(rows[j].size()) + " values, stack width is " +
                                                     std::to_string(width));
    out.row(static_cast<Eigen::Index>(j)) = rows[j].transpose();
  }
  return out;
}

double base_loss_value(BaseLoss loss, const Batch& y, const Batch& yhat) {
  check_batches(y, yhat);
  const auto m = static_cast<double>(y.rows());
  if (loss == BaseLoss::mse) return (y - yhat).squaredNorm() / m;
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index c = 0; c < y.cols(); ++c) total -= y(i, c) * std::log(std::max(yhat(i, c), kProbabilityFloor));
  return total / m;
}

Batch base_loss_gradient(BaseLoss loss, const Batch& y, const Batch& yhat) {
  check_batches(y, yhat);
  const auto m = static_cast<double>(y.rows());
  if (loss == BaseLoss::mse) return 2.0 * (yhat - y) / m;
  Batch g = Batch::Zero(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index c = 0; c < y.cols(); ++c)
      if (yhat(i, c) >= kProbabilityFloor) g(i, c) = -y(i, c) / (m * yhat(i, c));
  return g;
}

Projector resolve_projector(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, SeedStream* stream) {
  const std::size_t depth = stack.depth();
  return std::visit(
      [&](const auto& policy) -> Projector {
        using P = std::decay_t<decltype(policy)>;
        if constexpr (std::is_same_v<P, IdentityPolicy>) {
          return Projector::identity(depth);
        } else if constexpr (std::is_same_v<P, FixedPolicy>) {
          check_projector(policy.projector, stack);
          return policy.projector;
        } else if constexpr (std::is_same_v<P, ResamplePolicy>) {
          if (!stream) throw Error(ErrorCode::invalid_argument, "resample policy needs a seed stream");
          return frame_to_projector(haar_sample(policy.k, depth, stream->next()));
        } else {
          if (y.rows() < 1) throw Error(ErrorCode::invalid_argument, "PCA on targets needs a nonempty target batch");
          std::vector<Eigen::MatrixXd> stacks;
          Eigen::Index columns = 0;
          for (Eigen::Index i = 0; i < y.rows(); ++i) {
            stacks.push_back(stack.stack(y.row(i).transpose()));
            columns += stacks.back().cols();
          }
          Eigen::MatrixXd points(columns, static_cast<Eigen::Index>(depth));
          Eigen::Index row = 0;
          for (const auto& s : stacks) {
            points.middleRows(row, s.cols()) = s.transpose();
            row += s.cols();
          }
          return pca_projector(PointCloud(std::move(points)), policy.k).projector;
        }
      },
      spec.policy);
}

double feature_term(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, const Batch& yhat,
                    const Projector& p) {
  check_batches(y, yhat);
  check_spec(spec, stack);
  if (stack.depth() == 0) return 0.0;
  const auto m = static_cast<double>(y.rows());
  double total = 0.0;
  if (uses_identity(spec)) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const Eigen::VectorXd yi = y.row(i).transpose();
      const Eigen::VectorXd yhi = yhat.row(i).transpose();
      for (std::size_t j = 0; j < stack.depth(); ++j) {
        const auto& t = stack.transforms()[j];
        total += row_weight(spec, j) * (t->forward(yi) - t->forward(yhi)).squaredNorm();
      }
    }
    return total / m;
  }
  check_projector(p, stack);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const Eigen::MatrixXd diff = stack.stack(y.row(i).transpose()) - stack.stack(yhat.row(i).transpose());
    total += (p.matrix() * diff).squaredNorm();
  }
  return total / m;
}

double loss(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, const Batch& yhat,
            const Projector& p) {
  const double base = base_loss_value(spec.base_loss, y, yhat);
  const double weight = outer_weight(spec);
  if (weight == 0.0 && spec.alphas.empty()) return base;
  return base + weight * feature_term(spec, stack, y, yhat, p);
}

Batch loss_gradient(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, const Batch& yhat,
                    const Projector& p) {
  Batch grad = base_loss_gradient(spec.base_loss, y, yhat);
  check_spec(spec, stack);
  const double weight = outer_weight(spec);
  if (stack.depth() == 0 || (weight == 0.0 && spec.alphas.empty())) return grad;
  for (const auto& t : stack.transforms())
    if (!t->has_adjoint()) throw Error(ErrorCode::missing_adjoint, "transform " + t->name() + " has no adjoint");

  const double scale = 2.0 * weight / static_cast<double>(y.rows());
  const bool identity = uses_identity(spec);
  if (!identity) check_projector(p, stack);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const Eigen::VectorXd yi = y.row(i).transpose();
    const Eigen::VectorXd yhi = yhat.row(i).transpose();
    if (identity) {
      for (std::size_t j = 0; j < stack.depth(); ++j) {
        const auto& t = stack.transforms()[j];
        const Eigen::VectorXd cot = scale * row_weight(spec, j) * (t->forward(yhi) - t->forward(yi));
        grad.row(i) += t->adjoint(yhi, cot).transpose();
      }
      continue;
    }
    // ∂‖p D‖²/∂D = 2 pᵀp D = 2 p D for an orthogonal projector.
    const Eigen::MatrixXd cot = scale * p.matrix() * (stack.stack(yhi) - stack.stack(yi));
    for (std::size_t j = 0; j < stack.depth(); ++j)
      grad.row(i) +=
          stack.transforms()[j]->adjoint(yhi, cot.row(static_cast<Eigen::Index>(j)).transpose()).transpose();
  }
  return grad;
}

LossEvaluation evaluate(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, const Batch& yhat,
                        SeedStream* stream) {
  Projector p = resolve_projector(spec, stack, y, stream);
  const double value = loss(spec, stack, y, yhat, p);
  Batch grad = loss_gradient(spec, stack, y, yhat, p);
  return LossEvaluation{value, std::move(grad), std::move(p)};
}

double standard_at_loss(const std::vector<ATTerm>& terms, const Batch& y, const Batch& yhat) {
  check_batches(y, yhat);
  double total = 0.0;
  for (const auto& term : terms) {
    if (!term.transform) throw Error(ErrorCode::invalid_argument, "null transform in loss term");
    Batch ty(y.rows(), static_cast<Eigen::Index>(term.transform->output_dim(static_cast<std::size_t>(y.cols()))));
    Batch tyhat(ty.rows(), ty.cols());
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      ty.row(i) = term.transform->forward(y.row(i).transpose()).transpose();
      tyhat.row(i) = term.transform->forward(yhat.row(i).transpose()).transpose();
    }
    total += term.weight * base_loss_value(term.loss, ty, tyhat);
  }
  return total;
}

namespace {

BaseLoss parse_base_loss(const std::string& s) {
  if (s == "mse") return BaseLoss::mse;
  if (s == "cross_entropy") return BaseLoss::cross_entropy;
  throw Error(ErrorCode::parse_error, "unknown base_loss '" + s + "'");
}

TransformPtr transform_from_json(const nlohmann::json& t, const std::optional<ImageShape>& shape) {
  const std::string name = t.at("name").get<std::string>();
  if (name == "linear") return linear_transform(matrix_from_json(t.at("matrix")));
  if (name == "gauss_highpass") {
    if (!shape) throw Error(ErrorCode::missing_shape, "gauss_highpass needs image_shape");
    return gauss_highpass_transform(*shape, t.at("cutoff").get<double>());
  }
  if (name == "log" && t.contains("sigma")) {
    if (!shape) throw Error(ErrorCode::missing_shape, "log needs image_shape");
    return log_transform(*shape, t.at("sigma").get<double>());
  }
  return preset_transform(name, shape);
}

}  // namespace

ATLossConfig atloss_config_from_json(const nlohmann::json& j) {
  try {
    ATLossConfig cfg;
    cfg.spec.base_loss = parse_base_loss(j.value("base_loss", std::string("mse")));
    const std::string feature_loss = j.value("feature_loss", std::string("mse"));
    if (feature_loss != "mse" && feature_loss != "mse-frobenius")
      throw Error(ErrorCode::parse_error, "unknown feature_loss '" + feature_loss + "'");
    cfg.spec.alpha = j.value("alpha", 0.0);
    if (j.contains("alphas")) cfg.spec.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("image_shape")) {
      const auto dims = j.at("image_shape").get<std::vector<std::size_t>>();
      if (dims.size() != 2) throw Error(ErrorCode::parse_error, "image_shape must be [rows, cols]");
      cfg.image_shape = ImageShape{dims[0], dims[1]};
    }
    std::vector<TransformPtr> transforms;
    cfg.transforms_json = j.value("transforms", nlohmann::json::array());
    for (const auto& t : cfg.transforms_json) transforms.push_back(transform_from_json(t, cfg.image_shape));
    cfg.stack = FeatureStack(std::move(transforms));

    const nlohmann::json policy = j.value("projector", nlohmann::json{{"policy", "identity"}});
    const std::string kind = policy.at("policy").get<std::string>();
    if (kind == "identity") {
      cfg.spec.policy = IdentityPolicy{};
    } else if (kind == "fixed") {
      cfg.spec.policy = FixedPolicy{projector_from_json(policy.at("projector"))};
    } else if (kind == "resample") {
      cfg.spec.policy = ResamplePolicy{policy.at("k").get<std::size_t>()};
      if (policy.contains("seed")) cfg.seed = policy.at("seed").get<std::uint64_t>();
    } else if (kind == "pca_on_targets") {
      cfg.spec.policy = PcaOnTargetsPolicy{policy.at("k").get<std::size_t>()};
    } else {
      throw Error(ErrorCode::parse_error, "unknown projector policy '" + kind + "'");
    }
    check_spec(cfg.spec, cfg.stack);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("loss spec: ") + e.what());
  }
}

nlohmann::json to_json(const ATLossConfig& config) {
  nlohmann::json j;
  j["base_loss"] = config.spec.base_loss == BaseLoss::mse ? "mse" : "cross_entropy";
  j["feature_loss"] = "mse";
  j["alpha"] = config.spec.alpha;
  if (!config.spec.alphas.empty()) j["alphas"] = config.spec.alphas;
  if (config.image_shape) j["image_shape"] = {config.image_shape->rows, config.image_shape->cols};
  j["transforms"] = config.transforms_json;
  std::visit(
      [&](const auto& policy) {
        using P = std::decay_t<decltype(policy)>;
        if constexpr (std::is_same_v<P, IdentityPolicy>) {
          j["projector"] = {{"policy", "identity"}};
        } else if constexpr (std::is_same_v<P, FixedPolicy>) {
          j["projector"] = {{"policy", "fixed"}, {"projector", projector_to_json(policy.projector)}};
        } else if constexpr (std::is_same_v<P, ResamplePolicy>) {
          j["projector"] = {{"policy", "resample"}, {"k", policy.k}};
          if (config.seed) j["projector"]["seed"] = *config.seed;
        } else {
          j["projector"] = {{"policy", "pca_on_targets"}, {"k", policy.k}};
        }
      },
      config.spec.policy);
  return j;
}

}  // namespace orthoproj
