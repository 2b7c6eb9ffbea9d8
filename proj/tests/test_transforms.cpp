#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "orthoproj/error.hpp"
#include "orthoproj/transforms.hpp"
#include "support.hpp"

using namespace orthoproj;

namespace {

long mirror(long i, long n) {
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
  return i;
}

// Padded-then-flipped-kernel convolution, written out directly.
Eigen::VectorXd literal_convolution(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, long rows, long cols) {
  const long ra = k.rows() / 2, rb = k.cols() / 2;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(y.size());
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) {
      double acc = 0;
      for (long a = -ra; a <= ra; ++a)
        for (long b = -rb; b <= rb; ++b) acc += k(ra + a, rb + b) * y(mirror(r - a, rows) * cols + mirror(c - b, cols));
      out(r * cols + c) = acc;
    }
  return out;
}

// Highpass by explicit DFT of the mirrored 2n × 2m image.
Eigen::VectorXd literal_highpass(const Eigen::VectorXd& y, long rows, long cols, double cutoff) {
  const long R = 2 * rows, C = 2 * cols;
  using cd = std::complex<double>;
  std::vector<cd> ext(R * C), spec(R * C);
  for (long r = 0; r < R; ++r)
    for (long c = 0; c < C; ++c) ext[r * C + c] = y(mirror(r, rows) * cols + mirror(c, cols));
  const double tau = 2 * std::numbers::pi;
  for (long u = 0; u < R; ++u)
    for (long v = 0; v < C; ++v) {
      cd acc = 0;
      for (long r = 0; r < R; ++r)
        for (long c = 0; c < C; ++c) acc += ext[r * C + c] * std::polar(1.0, -tau * (double(u * r) / R + double(v * c) / C));
      const double du = double(std::min(u, R - u)), dv = double(std::min(v, C - v));
      spec[u * C + v] = acc * (1.0 - std::exp(-(du * du + dv * dv) / (2 * cutoff * cutoff)));
    }
  Eigen::VectorXd out(rows * cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) {
      cd acc = 0;
      for (long u = 0; u < R; ++u)
        for (long v = 0; v < C; ++v) acc += spec[u * C + v] * std::polar(1.0, tau * (double(u * r) / R + double(v * c) / C));
      out(r * cols + c) = acc.real() / double(R * C);
    }
  return out;
}

void check_adjoint(const FeatureTransform& t, std::size_t s, testing::Gen& gen) {
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd x = gen.vector(Eigen::Index(s));
    const Eigen::VectorXd g = gen.vector(Eigen::Index(t.output_dim(s)));
    const double lhs = t.forward(x).dot(g), rhs = x.dot(t.adjoint(x, g));
    CHECK(std::abs(lhs - rhs) <= 1e-11 * (1.0 + std::abs(lhs)));
  }
}

}  // namespace

TEST_CASE("convolutions match the literal mirrored sum") {
  testing::Gen gen(1);
  for (auto [rows, cols] : {std::pair{5L, 7L}, std::pair{1L, 4L}, std::pair{3L, 3L}, std::pair{9L, 2L}}) {
    const ImageShape shape{std::size_t(rows), std::size_t(cols)};
    const Eigen::VectorXd y = gen.vector(rows * cols);
    CHECK((prewitt_transform(shape)->forward(y) - literal_convolution(y, prewitt_kernel(), rows, cols)).norm() < 1e-12);
    CHECK((log_transform(shape)->forward(y) - literal_convolution(y, log_kernel(1.0), rows, cols)).norm() < 1e-12);
    const Eigen::MatrixXd odd = gen.matrix(3, 5);
    CHECK((convolution_transform("k", odd, shape)->forward(y) - literal_convolution(y, odd, rows, cols)).norm() < 1e-12);
  }
}

TEST_CASE("prewitt responds to a horizontal ramp only") {
  const ImageShape shape{6, 6};
  Eigen::VectorXd ramp(36), flat(36);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      ramp(r * 6 + c) = c;
      flat(r * 6 + c) = r;
    }
  const auto p = prewitt_transform(shape);
  const Eigen::VectorXd out = p->forward(ramp);
  for (int r = 0; r < 6; ++r)
    for (int c = 1; c < 5; ++c) CHECK(std::abs(out(r * 6 + c)) == doctest::Approx(6.0));
  CHECK(p->forward(flat).norm() < 1e-12);
}

TEST_CASE("LoG kernel is zero-sum and annihilates constants") {
  for (double sigma : {0.5, 1.0, 1.7}) {
    const Eigen::MatrixXd k = log_kernel(sigma);
    CHECK(k.rows() == 2 * long(std::ceil(3 * sigma)) + 1);
    CHECK(std::abs(k.sum()) < 1e-14);
    CHECK((k - k.transpose()).norm() < 1e-15);
  }
  const ImageShape shape{4, 5};
  CHECK(log_transform(shape)->forward(Eigen::VectorXd::Constant(20, 3.0)).norm() < 1e-12);
}

TEST_CASE("highpass matches an explicit DFT of the mirrored image") {
  testing::Gen gen(2);
  for (double cutoff : {0.7, 2.0, 40.0}) {
    for (auto [rows, cols] : {std::pair{4L, 3L}, std::pair{2L, 5L}, std::pair{1L, 1L}}) {
      const Eigen::VectorXd y = gen.vector(rows * cols);
      const auto h = gauss_highpass_transform({std::size_t(rows), std::size_t(cols)}, cutoff);
      CHECK((h->forward(y) - literal_highpass(y, rows, cols, cutoff)).norm() < 1e-10);
    }
  }
}

TEST_CASE("lowpass operator preserves constants") {
  for (std::size_t n : {1, 2, 7, 16}) {
    const Eigen::MatrixXd op = gaussian_lowpass_operator(n, 1.3);
    CHECK((op.rowwise().sum() - Eigen::VectorXd::Ones(Eigen::Index(n))).norm() < 1e-12);
  }
  const auto h = gauss_highpass_transform({3, 4}, 2.0);
  CHECK(h->forward(Eigen::VectorXd::Constant(12, -2.0)).norm() < 1e-12);
}

TEST_CASE("adjoints pass the dot-product test") {
  testing::Gen gen(3);
  const ImageShape shape{5, 4};
  check_adjoint(*identity_transform(), 7, gen);
  check_adjoint(*linear_transform(gen.matrix(3, 6)), 6, gen);
  check_adjoint(*prewitt_transform(shape), 20, gen);
  check_adjoint(*log_transform(shape, 0.8), 20, gen);
  check_adjoint(*gauss_highpass_transform(shape, 1.5), 20, gen);
  check_adjoint(*preset_transform("gauss40", shape), 20, gen);
  check_adjoint(*preset_transform("gauss100", shape), 20, gen);
}

TEST_CASE("presets and shape metadata") {
  for (const auto& name : preset_transform_names()) CHECK_NOTHROW(preset_transform(name, ImageShape{3, 3}));
  CHECK_NOTHROW(preset_transform("identity", std::nullopt));
  try {
    preset_transform("prewitt", std::nullopt);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_shape);
  }
  CHECK_THROWS_AS(preset_transform("sobel", ImageShape{3, 3}), Error);
  CHECK_THROWS_AS(prewitt_transform({3, 3})->forward(Eigen::VectorXd::Zero(8)), Error);
}

TEST_CASE("function transforms with and without adjoint") {
  const auto square = function_transform(
      "square", [](const Eigen::VectorXd& y) { Eigen::VectorXd o = y.array().square(); return o; },
      [](const Eigen::VectorXd& y, const Eigen::VectorXd& g) { Eigen::VectorXd o = 2.0 * y.array() * g.array(); return o; });
  Eigen::VectorXd y(2);
  y << 3, -1;
  CHECK(square->forward(y)(0) == 9.0);
  CHECK(square->adjoint(y, Eigen::VectorXd::Ones(2))(1) == -2.0);
  CHECK(square->output_dim(2) == 2);
  const auto opaque = function_transform("opaque", [](const Eigen::VectorXd& v) { return v; });
  CHECK_FALSE(opaque->has_adjoint());
  try {
    opaque->adjoint(y, y);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_adjoint);
  }
}
