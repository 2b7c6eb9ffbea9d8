#include <doctest.h>

#include <cmath>
#include <string>

#include "orthoproj/atloss.hpp"
#include "orthoproj/error.hpp"
#include "orthoproj/grassmann.hpp"
#include "support.hpp"

using namespace orthoproj;

namespace {

TransformPtr square_transform() {
  return function_transform(
      "square", [](const Eigen::VectorXd& y) { Eigen::VectorXd o = y.array().square(); return o; },
      [](const Eigen::VectorXd& y, const Eigen::VectorXd& g) { Eigen::VectorXd o = 2.0 * y.array() * g.array(); return o; });
}

Batch central_difference(const ATLossSpec& spec, const FeatureStack& stack, const Batch& y, const Batch& yhat,
                         const Projector& p, double h) {
  Batch g(yhat.rows(), yhat.cols());
  for (Eigen::Index i = 0; i < yhat.rows(); ++i)
    for (Eigen::Index c = 0; c < yhat.cols(); ++c) {
      Batch up = yhat, down = yhat;
      up(i, c) += h;
      down(i, c) -= h;
      g(i, c) = (loss(spec, stack, y, up, p) - loss(spec, stack, y, down, p)) / (2 * h);
    }
  return g;
}

Batch probabilities(testing::Gen& gen, Eigen::Index m, Eigen::Index s) {
  Batch b(m, s);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index c = 0; c < s; ++c) b(i, c) = gen.uniform(0.05, 1.0);
  return b;
}

}  // namespace

TEST_CASE("base losses on a small example") {
  Batch y(2, 2), yhat(2, 2);
  y << 1, 0, 0, 1;
  yhat << 0.5, 0.5, 0.25, 0.75;
  CHECK(base_loss_value(BaseLoss::mse, y, yhat) == doctest::Approx((0.25 + 0.25 + 0.0625 + 0.0625) / 2));
  CHECK(base_loss_value(BaseLoss::cross_entropy, y, yhat) == doctest::Approx(-(std::log(0.5) + std::log(0.75)) / 2));
  const Batch g = base_loss_gradient(BaseLoss::cross_entropy, y, yhat);
  CHECK(g(0, 0) == doctest::Approx(-1.0 / (2 * 0.5)));
  CHECK(g(0, 1) == 0.0);
  Batch tiny = yhat;
  tiny(0, 0) = 0.0;
  CHECK(std::isfinite(base_loss_value(BaseLoss::cross_entropy, y, tiny)));
  CHECK(base_loss_gradient(BaseLoss::cross_entropy, y, tiny)(0, 0) == 0.0);
  CHECK_THROWS_AS(base_loss_value(BaseLoss::mse, y, Batch::Zero(3, 2)), Error);
}

TEST_CASE("alpha zero reduces to the base loss exactly") {
  testing::Gen gen(1);
  const ImageShape shape{4, 4};
  const FeatureStack stack({prewitt_transform(shape), log_transform(shape), gauss_highpass_transform(shape, 2.0)});
  const Batch y = gen.matrix(3, 16), yhat = gen.matrix(3, 16);
  for (BaseLoss base : {BaseLoss::mse, BaseLoss::cross_entropy}) {
    ATLossSpec spec;
    spec.base_loss = base;
    spec.alpha = 0.0;
    const Batch yy = base == BaseLoss::mse ? y : probabilities(gen, 3, 16);
    const Batch yh = base == BaseLoss::mse ? yhat : probabilities(gen, 3, 16);
    const LossEvaluation ev = evaluate(spec, stack, yy, yh);
    CHECK(ev.value == base_loss_value(base, yy, yh));
    CHECK(ev.gradient == base_loss_gradient(base, yy, yh));
  }
}

TEST_CASE("identity policy equals the explicit per-transform sum") {
  testing::Gen gen(2);
  const ImageShape shape{5, 3};
  const std::vector<TransformPtr> ts{prewitt_transform(shape), log_transform(shape), linear_transform(gen.matrix(4, 15)),
                                     gauss_highpass_transform(shape, 1.0)};
  const FeatureStack stack(ts);
  const Batch y = gen.matrix(6, 15), yhat = gen.matrix(6, 15);

  ATLossSpec spec;
  spec.alphas = {0.3, 1.2, 0.05, 2.0};
  std::vector<ATTerm> terms{{identity_transform(), 1.0, BaseLoss::mse}};
  for (std::size_t j = 0; j < ts.size(); ++j) terms.push_back({ts[j], spec.alphas[j], BaseLoss::mse});
  const double want = standard_at_loss(terms, y, yhat);
  const double got = loss(spec, stack, y, yhat, resolve_projector(spec, stack, y));
  CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));

  ATLossSpec single;
  single.alpha = 0.7;
  std::vector<ATTerm> same{{identity_transform(), 1.0, BaseLoss::mse}};
  for (const auto& t : ts) same.push_back({t, 0.7, BaseLoss::mse});
  CHECK(std::abs(loss(single, stack, y, yhat, Projector::identity(4)) - standard_at_loss(same, y, yhat)) <=
        1e-12 * standard_at_loss(same, y, yhat));
}

TEST_CASE("identity policy agrees with a fixed identity projector") {
  testing::Gen gen(3);
  const ImageShape shape{3, 3};
  const FeatureStack stack({prewitt_transform(shape), log_transform(shape)});
  const Batch y = gen.matrix(4, 9), yhat = gen.matrix(4, 9);
  ATLossSpec a;
  a.alpha = 0.4;
  ATLossSpec b = a;
  b.policy = FixedPolicy{Projector::identity(2)};
  const auto ea = evaluate(a, stack, y, yhat), eb = evaluate(b, stack, y, yhat);
  CHECK(ea.value == doctest::Approx(eb.value).epsilon(1e-13));
  CHECK((ea.gradient - eb.gradient).norm() <= 1e-12 * ea.gradient.norm());
}

TEST_CASE("gradients match central differences") {
  testing::Gen gen(4);
  const ImageShape shape{4, 5};
  const std::vector<TransformPtr> pool{prewitt_transform(shape), log_transform(shape), gauss_highpass_transform(shape, 1.5),
                                       preset_transform("gauss40", shape), square_transform(), identity_transform()};
  SeedStream stream(9);
  for (int t = 0; t < 24; ++t) {
    std::vector<TransformPtr> chosen;
    const std::size_t depth = gen.index(1, 4);
    for (std::size_t j = 0; j < depth; ++j) chosen.push_back(pool[gen.index(0, pool.size() - 1)]);
    const FeatureStack stack(chosen);
    ATLossSpec spec;
    spec.base_loss = t % 3 == 0 ? BaseLoss::cross_entropy : BaseLoss::mse;
    spec.alpha = gen.uniform(0.1, 2.0);
    switch (t % 4) {
      case 0: break;
      case 1: spec.policy = FixedPolicy{frame_to_projector(haar_sample(gen.index(1, depth), depth, t))}; break;
      case 2: spec.policy = ResamplePolicy{gen.index(1, depth)}; break;
      case 3:
        if (depth > 1) spec.policy = PcaOnTargetsPolicy{gen.index(1, depth - 1)};
        else spec.alphas = {gen.uniform(0.1, 1.0)};
        break;
    }
    const Batch y = probabilities(gen, 3, 20), yhat = probabilities(gen, 3, 20);
    const LossEvaluation ev = evaluate(spec, stack, y, yhat, &stream);
    const Batch fd = central_difference(spec, stack, y, yhat, ev.projector, 1e-6);
    CAPTURE(t);
    CHECK((fd - ev.gradient).norm() <= 1e-5 * ev.gradient.norm());
    CHECK(ev.value == doctest::Approx(loss(spec, stack, y, yhat, ev.projector)));
  }
}

TEST_CASE("resampled projectors shrink the feature term by k/d on average") {
  testing::Gen gen(5);
  const FeatureStack stack({linear_transform(gen.matrix(3, 6)), linear_transform(gen.matrix(3, 6)),
                            linear_transform(gen.matrix(3, 6)), linear_transform(gen.matrix(3, 6))});
  const Batch y = gen.matrix(5, 6), yhat = gen.matrix(5, 6);
  ATLossSpec id;
  id.alpha = 1.0;
  const double full = feature_term(id, stack, y, yhat, Projector::identity(4));
  ATLossSpec rs = id;
  rs.policy = ResamplePolicy{1};
  SeedStream stream(3);
  double sum = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) sum += feature_term(rs, stack, y, yhat, resolve_projector(rs, stack, y, &stream));
  CHECK(testing::rel_err(sum / n, 0.25 * full) < 0.05);
  CHECK(stream.draws() == std::uint64_t(n));
}

TEST_CASE("pca policy builds a rank-k projector from the targets") {
  testing::Gen gen(6);
  const ImageShape shape{3, 4};
  const FeatureStack stack({prewitt_transform(shape), log_transform(shape), identity_transform()});
  ATLossSpec spec;
  spec.policy = PcaOnTargetsPolicy{2};
  const Batch y = gen.matrix(5, 12);
  const Projector p = resolve_projector(spec, stack, y);
  CHECK(p.k() == 2);
  CHECK(p.d() == 3);
  CHECK(resolve_projector(spec, stack, y).matrix() == p.matrix());
}

TEST_CASE("loss configuration errors") {
  testing::Gen gen(7);
  const ImageShape shape{2, 2};
  const FeatureStack stack({prewitt_transform(shape)});
  const Batch y = gen.matrix(2, 4);
  ATLossSpec rs;
  rs.alpha = 1.0;
  rs.policy = ResamplePolicy{1};
  CHECK_THROWS_AS(resolve_projector(rs, stack, y), Error);

  ATLossSpec weighted;
  weighted.alphas = {1.0};
  weighted.policy = FixedPolicy{Projector::identity(1)};
  CHECK_THROWS_AS(loss(weighted, stack, y, y, Projector::identity(1)), Error);

  ATLossSpec empty;
  empty.alpha = 1.0;
  CHECK_THROWS_AS(loss(empty, FeatureStack{}, y, y, Projector::identity(0)), Error);
  ATLossSpec negative;
  negative.alpha = -1.0;
  CHECK_THROWS_AS(loss(negative, stack, y, y, Projector::identity(1)), Error);

  ATLossSpec fixed;
  fixed.alpha = 1.0;
  fixed.policy = FixedPolicy{Projector::identity(3)};
  try {
    resolve_projector(fixed, stack, y);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }

  const FeatureStack ragged({identity_transform(), linear_transform(gen.matrix(2, 4))});
  CHECK_THROWS_AS(ragged.stack(gen.vector(4)), Error);
  ATLossSpec shaped;
  shaped.alpha = 1.0;
  shaped.policy = FixedPolicy{Projector::identity(2)};
  CHECK_THROWS_AS(loss(shaped, ragged, y, y, Projector::identity(2)), Error);
  // identity policy tolerates different output sizes
  ATLossSpec plain;
  plain.alpha = 1.0;
  CHECK_NOTHROW(loss(plain, ragged, y, y, Projector::identity(2)));

  const FeatureStack opaque({function_transform("opaque", [](const Eigen::VectorXd& v) { return v; })});
  CHECK_NOTHROW(loss(plain, opaque, y, y, Projector::identity(1)));
  try {
    loss_gradient(plain, opaque, y, y, Projector::identity(1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_adjoint);
  }
}

TEST_CASE("configuration JSON round-trips") {
  const auto j = nlohmann::json::parse(R"({
    "base_loss": "cross_entropy", "feature_loss": "mse", "alpha": 0.25, "image_shape": [3, 4],
    "transforms": [{"name": "prewitt"}, {"name": "log", "sigma": 0.8}, {"name": "gauss40"},
                   {"name": "gauss_highpass", "cutoff": 2.5}],
    "projector": {"policy": "resample", "k": 2, "seed": 17}})");
  const ATLossConfig cfg = atloss_config_from_json(j);
  CHECK(cfg.stack.depth() == 4);
  CHECK(cfg.spec.base_loss == BaseLoss::cross_entropy);
  CHECK(std::get<ResamplePolicy>(cfg.spec.policy).k == 2);
  REQUIRE(cfg.seed.has_value());
  CHECK(*cfg.seed == 17);
  CHECK(to_json(atloss_config_from_json(to_json(cfg))) == to_json(cfg));

  const ATLossConfig fixed = atloss_config_from_json(nlohmann::json{
      {"alpha", 1.0},
      {"transforms", {{{"name", "identity"}}, {{"name", "linear"}, {"matrix", nlohmann::json::array({nlohmann::json::array({1.0, 2.0})})}}}},
      {"projector", {{"policy", "identity"}}}});
  CHECK(fixed.stack.depth() == 2);

  CHECK_THROWS_AS(atloss_config_from_json(nlohmann::json{{"transforms", {{{"name", "prewitt"}}}}}), Error);
  CHECK_THROWS_AS(atloss_config_from_json(nlohmann::json{{"base_loss", "hinge"}}), Error);
  CHECK_THROWS_AS(atloss_config_from_json(nlohmann::json{{"projector", {{"policy", "random"}}}}), Error);
}
