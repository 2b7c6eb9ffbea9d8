#include "orthoproj/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace orthoproj {

Rng make_rng(std::uint64_t seed) { return Rng(seed); }

void fill_standard_normal(Rng& rng, Eigen::MatrixXd& out) {
  boost::random::normal_distribution<double> normal;
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = normal(rng);
}

double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> normal;
  return normal(rng);
}

std::uint64_t SeedStream::next() noexcept {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  ++draws_;
  return z ^ (z >> 31);
}

}  // namespace orthoproj
