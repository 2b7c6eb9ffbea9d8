#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace orthoproj {

// Every stochastic routine takes either a seed or an explicit engine owned by
// the caller. There is no global generator.
using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed);

// Fills `out` with independent standard normal draws in row-major order.
void fill_standard_normal(Rng& rng, Eigen::MatrixXd& out);
double standard_normal(Rng& rng);

// Deterministic stream of derived seeds. Copying a stream forks it; the
// training-loop caller owns one per loop.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() noexcept;
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
};

}  // namespace orthoproj
