#include "orthoproj/transforms.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "orthoproj/error.hpp"

namespace orthoproj {

namespace {

// Half-sample symmetric extension: ... b a | a b c ... c b a | a b ...
std::ptrdiff_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
  const std::ptrdiff_t period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

void require_size(std::size_t got, std::size_t want, const std::string& who) {
  if (got != want)
    throw Error(ErrorCode::dimension_mismatch,
                who + ": input has " + std::to_string(got) + " entries, expected " + std::to_string(want));
}

class IdentityTransform final : public FeatureTransform {
 public:
  std::string name() const override { return "identity"; }
  std::size_t output_dim(std::size_t s) const override { return s; }
  Eigen::VectorXd forward(const Eigen::VectorXd& y) const override { return y; }
  Eigen::VectorXd adjoint(const Eigen::VectorXd&, const Eigen::VectorXd& g) const override { return g; }
  bool is_linear() const override { return true; }
};

class LinearTransform final : public FeatureTransform {
 public:
  LinearTransform(Eigen::MatrixXd a, std::string name) : a_(std::move(a)), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::size_t output_dim(std::size_t s) const override {
    require_size(s, static_cast<std::size_t>(a_.cols()), name_);
    return static_cast<std::size_t>(a_.rows());
  }
  Eigen::VectorXd forward(const Eigen::VectorXd& y) const override {
    output_dim(static_cast<std::size_t>(y.size()));
    return a_ * y;
  }
  Eigen::VectorXd adjoint(const Eigen::VectorXd&, const Eigen::VectorXd& g) const override {
    return a_.transpose() * g;
  }
  bool is_linear() const override { return true; }

 private:
  Eigen::MatrixXd a_;
  std::string name_;
};

class ConvolutionTransform final : public FeatureTransform {
 public:
  ConvolutionTransform(std::string name, Eigen::MatrixXd kernel, ImageShape shape)
      : name_(std::move(name)), kernel_(std::move(kernel)), shape_(shape) {
    if (kernel_.rows() % 2 == 0 || kernel_.cols() % 2 == 0)
      throw Error(ErrorCode::invalid_argument, name_ + ": kernel sides must be odd");
    if (shape_.size() == 0) throw Error(ErrorCode::missing_shape, name_ + ": image shape is empty");
  }
  std::string name() const override { return name_; }
  std::size_t output_dim(std::size_t s) const override {
    require_size(s, shape_.size(), name_);
    return s;
  }
  Eigen::VectorXd forward(const Eigen::VectorXd& y) const override {
    output_dim(static_cast<std::size_t>(y.size()));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(y.size());
    visit([&](Eigen::Index dst, Eigen::Index src, double w) { out(dst) += w * y(src); });
    return out;
  }
  Eigen::VectorXd adjoint(const Eigen::VectorXd&, const Eigen::VectorXd& g) const override {
    output_dim(static_cast<std::size_t>(g.size()));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
    visit([&](Eigen::Index dst, Eigen::Index src, double w) { out(src) += w * g(dst); });
    return out;
  }
  bool is_linear() const override { return true; }

 private:
  // Calls f(output index, input index, weight) for every tap of
  // out(r, c) = Σ K(a, b) · y(r + ra − a, c + rb − b).
  template <typename F>
  void visit(F&& f) const {
    const auto rows = static_cast<std::ptrdiff_t>(shape_.rows);
    const auto cols = static_cast<std::ptrdiff_t>(shape_.cols);
    const std::ptrdiff_t ra = kernel_.rows() / 2;
    const std::ptrdiff_t rb = kernel_.cols() / 2;
    for (std::ptrdiff_t r = 0; r < rows; ++r)
      for (std::ptrdiff_t c = 0; c < cols; ++c)
        for (std::ptrdiff_t a = 0; a < kernel_.rows(); ++a)
          for (std::ptrdiff_t b = 0; b < kernel_.cols(); ++b) {
            const double w = kernel_(a, b);
            if (w == 0.0) continue;
            const std::ptrdiff_t sr = reflect(r + ra - a, rows);
            const std::ptrdiff_t sc = reflect(c + rb - b, cols);
            f(r * cols + c, sr * cols + sc, w);
          }
  }

  std::string name_;
  Eigen::MatrixXd kernel_;
  ImageShape shape_;
};

class HighpassTransform final : public FeatureTransform {
 public:
  HighpassTransform(ImageShape shape, double cutoff) : shape_(shape), cutoff_(cutoff) {
    if (shape_.size() == 0) throw Error(ErrorCode::missing_shape, "gauss_highpass: image shape is empty");
    if (!(cutoff > 0.0)) throw Error(ErrorCode::invalid_argument, "gauss_highpass: cutoff must be positive");
    row_op_ = gaussian_lowpass_operator(shape_.rows, cutoff_);
    col_op_ = gaussian_lowpass_operator(shape_.cols, cutoff_);
  }
  std::string name() const override { return "gauss_highpass(" + std::to_string(cutoff_) + ")"; }
  std::size_t output_dim(std::size_t s) const override {
    require_size(s, shape_.size(), "gauss_highpass");
    return s;
  }
  Eigen::VectorXd forward(const Eigen::VectorXd& y) const override {
    output_dim(static_cast<std::size_t>(y.size()));
    const Eigen::MatrixXd img = as_image(y);
    return flatten(img - row_op_ * img * col_op_.transpose());
  }
  Eigen::VectorXd adjoint(const Eigen::VectorXd&, const Eigen::VectorXd& g) const override {
    output_dim(static_cast<std::size_t>(g.size()));
    const Eigen::MatrixXd img = as_image(g);
    return flatten(img - row_op_.transpose() * img * col_op_);
  }
  bool is_linear() const override { return true; }

 private:
  Eigen::MatrixXd as_image(const Eigen::VectorXd& v) const {
    Eigen::MatrixXd img(static_cast<Eigen::Index>(shape_.rows), static_cast<Eigen::Index>(shape_.cols));
    for (Eigen::Index r = 0; r < img.rows(); ++r)
      for (Eigen::Index c = 0; c < img.cols(); ++c) img(r, c) = v(r * img.cols() + c);
    return img;
  }
  static Eigen::VectorXd flatten(const Eigen::MatrixXd& img) {
    Eigen::VectorXd v(img.size());
    for (Eigen::Index r = 0; r < img.rows(); ++r)
      for (Eigen::Index c = 0; c < img.cols(); ++c) v(r * img.cols() + c) = img(r, c);
    return v;
  }

  ImageShape shape_;
  double cutoff_;
  Eigen::MatrixXd row_op_;
  Eigen::MatrixXd col_op_;
};

class FunctionTransform final : public FeatureTransform {
 public:
  FunctionTransform(std::string name, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fwd,
                    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> adj)
      : name_(std::move(name)), forward_(std::move(fwd)), adjoint_(std::move(adj)) {
    if (!forward_) throw Error(ErrorCode::invalid_argument, name_ + ": forward map is required");
  }
  std::string name() const override { return name_; }
  std::size_t output_dim(std::size_t s) const override {
    return static_cast<std::size_t>(forward_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s))).size());
  }
  Eigen::VectorXd forward(const Eigen::VectorXd& y) const override { return forward_(y); }
  Eigen::VectorXd adjoint(const Eigen::VectorXd& y, const Eigen::VectorXd& g) const override {
    if (!adjoint_) throw Error(ErrorCode::missing_adjoint, name_ + " has no adjoint; it cannot be differentiated");
    return adjoint_(y, g);
  }
  bool has_adjoint() const override { return static_cast<bool>(adjoint_); }

 private:
  std::string name_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> adjoint_;
};

}  // namespace

TransformPtr identity_transform() { return std::make_shared<IdentityTransform>(); }

TransformPtr linear_transform(Eigen::MatrixXd a, std::string name) {
  if (a.size() == 0) throw Error(ErrorCode::invalid_argument, "linear transform needs a nonempty matrix");
  return std::make_shared<LinearTransform>(std::move(a), std::move(name));
}

TransformPtr convolution_transform(std::string name, Eigen::MatrixXd kernel, ImageShape shape) {
  return std::make_shared<ConvolutionTransform>(std::move(name), std::move(kernel), shape);
}

Eigen::MatrixXd prewitt_kernel() {
  Eigen::MatrixXd k(3, 3);
  k << -1, 0, 1,  //
      -1, 0, 1,   //
      -1, 0, 1;
  return k;
}

Eigen::MatrixXd log_kernel(double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::invalid_argument, "LoG sigma must be positive");
  const auto radius = static_cast<Eigen::Index>(std::ceil(3.0 * sigma));
  const Eigen::Index side = 2 * radius + 1;
  Eigen::MatrixXd k(side, side);
  const double s2 = sigma * sigma;
  for (Eigen::Index a = 0; a < side; ++a)
    for (Eigen::Index b = 0; b < side; ++b) {
      const double r2 = static_cast<double>((a - radius) * (a - radius) + (b - radius) * (b - radius));
      k(a, b) = -1.0 / (std::numbers::pi * s2 * s2) * (1.0 - r2 / (2.0 * s2)) * std::exp(-r2 / (2.0 * s2));
    }
  k.array() -= k.mean();
  return k;
}

TransformPtr prewitt_transform(ImageShape shape) { return convolution_transform("prewitt", prewitt_kernel(), shape); }

TransformPtr log_transform(ImageShape shape, double sigma) {
  return convolution_transform("log", log_kernel(sigma), shape);
}

Eigen::MatrixXd gaussian_lowpass_operator(std::size_t n, double cutoff) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "operator length must be positive");
  const std::size_t period = 2 * n;
  const auto np = static_cast<double>(period);
  // Real, even frequency response → real, even circular impulse response.
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(period));
  for (std::size_t t = 0; t < period; ++t) {
    double acc = 0.0;
    for (std::size_t u = 0; u < period; ++u) {
      const auto centred = static_cast<double>(std::min(u, period - u));
      const double response = std::exp(-centred * centred / (2.0 * cutoff * cutoff));
      acc += response * std::cos(2.0 * std::numbers::pi * static_cast<double>((u * t) % period) / np);
    }
    h(static_cast<Eigen::Index>(t)) = acc / np;
  }
  const auto p = static_cast<std::ptrdiff_t>(period);
  const auto len = static_cast<std::ptrdiff_t>(n);
  const auto circ = [&](std::ptrdiff_t i) { return h(((i % p) + p) % p); };
  Eigen::MatrixXd op(len, len);
  for (std::ptrdiff_t i = 0; i < len; ++i)
    for (std::ptrdiff_t j = 0; j < len; ++j) op(i, j) = circ(i - j) + circ(i - (2 * len - 1 - j));
  return op;
}

TransformPtr gauss_highpass_transform(ImageShape shape, double cutoff) {
  return std::make_shared<HighpassTransform>(shape, cutoff);
}

TransformPtr function_transform(std::string name, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward,
                                std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> adjoint) {
  return std::make_shared<FunctionTransform>(std::move(name), std::move(forward), std::move(adjoint));
}

TransformPtr preset_transform(std::string_view name, std::optional<ImageShape> shape) {
  if (name == "identity") return identity_transform();
  const bool image_preset = name == "prewitt" || name == "log" || name == "gauss40" || name == "gauss100";
  if (!image_preset) throw Error(ErrorCode::invalid_argument, "unknown transform preset '" + std::string(name) + "'");
  if (!shape || shape->size() == 0)
    throw Error(ErrorCode::missing_shape, "transform '" + std::string(name) + "' needs 2-D image shape metadata");
  if (name == "prewitt") return prewitt_transform(*shape);
  if (name == "log") return log_transform(*shape);
  if (name == "gauss40") return gauss_highpass_transform(*shape, 40.0);
  return gauss_highpass_transform(*shape, 100.0);
}

std::vector<std::string> preset_transform_names() { return {"identity", "prewitt", "log", "gauss40", "gauss100"}; }

}  // namespace orthoproj
