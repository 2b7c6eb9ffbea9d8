#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace orthoproj {

/// Row-major 2-D layout of a target vector: pixel (r, c) sits at r·cols + c.
struct ImageShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t size() const noexcept { return rows * cols; }
};

/// A feature map T_j : R^s → R^t together with its transpose-Jacobian action.
class FeatureTransform {
 public:
  virtual ~FeatureTransform() = default;

  virtual std::string name() const = 0;
  /// Output size for inputs of size s; throws when s is not accepted.
  virtual std::size_t output_dim(std::size_t s) const = 0;
  virtual Eigen::VectorXd forward(const Eigen::VectorXd& y) const = 0;
  /// J(y)ᵀ g. Linear transforms ignore y.
  virtual Eigen::VectorXd adjoint(const Eigen::VectorXd& y, const Eigen::VectorXd& g) const = 0;
  virtual bool has_adjoint() const { return true; }
  virtual bool is_linear() const { return false; }
};

using TransformPtr = std::shared_ptr<const FeatureTransform>;

TransformPtr identity_transform();

/// y ↦ A y for a t×s matrix A. A single row v gives ⟨v, y⟩.
TransformPtr linear_transform(Eigen::MatrixXd a, std::string name = "linear");

/// Same-size 2-D convolution with half-sample symmetric (reflective) padding.
/// The kernel has odd side lengths and is centred.
TransformPtr convolution_transform(std::string name, Eigen::MatrixXd kernel, ImageShape shape);

/// Horizontal-gradient Prewitt kernel.
Eigen::MatrixXd prewitt_kernel();
/// Laplacian of Gaussian on a (2·⌈3σ⌉+1)² grid, shifted to zero sum.
Eigen::MatrixXd log_kernel(double sigma);

TransformPtr prewitt_transform(ImageShape shape);
TransformPtr log_transform(ImageShape shape, double sigma = 1.0);

/// Frequency-domain Gaussian highpass, H = 1 − exp(−D²/(2·cutoff²)), with D the
/// distance in frequency-index units on the symmetrically extended image.
TransformPtr gauss_highpass_transform(ImageShape shape, double cutoff);

/// Separable 1-D lowpass operator of the highpass above, for length n.
Eigen::MatrixXd gaussian_lowpass_operator(std::size_t n, double cutoff);

/// A user-supplied, possibly nonlinear transform. Without an adjoint the
/// transform can be evaluated but not differentiated.
TransformPtr function_transform(std::string name, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward,
                                std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> adjoint =
                                    nullptr);

/// Named presets: identity, prewitt, log, gauss40, gauss100. Image presets
/// need a shape; otherwise missing_shape is thrown.
TransformPtr preset_transform(std::string_view name, std::optional<ImageShape> shape);
std::vector<std::string> preset_transform_names();

}  // namespace orthoproj
