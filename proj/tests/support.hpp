#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Core>

#include "orthoproj/point_cloud.hpp"

namespace testing {

inline std::string data_file(const std::string& name) { return std::string(ORTHOPROJ_DATA_DIR) + "/" + name; }

// Test-side generator, separate from the library RNG.
struct Gen {
  std::mt19937 eng;
  explicit Gen(std::uint32_t seed) : eng(seed) {}
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(eng); }
  Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }
  Eigen::VectorXd vector(Eigen::Index n) { return matrix(n, 1).col(0); }
  orthoproj::PointCloud cloud(std::size_t m, std::size_t d) {
    return orthoproj::PointCloud(matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d)));
  }
};

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace testing
