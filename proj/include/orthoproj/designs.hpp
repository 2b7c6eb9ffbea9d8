#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "orthoproj/grassmann.hpp"

namespace orthoproj {

enum class CandidateSource { file, haar_sample, synthetic };

/// Finite projector set {p_l} ⊂ G_{k,d}, stored as frames sharing k and d.
class CandidateSet {
 public:
  CandidateSet(std::vector<StiefelFrame> frames, CandidateSource source);

  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t k() const noexcept { return frames_.front().k(); }
  std::size_t d() const noexcept { return frames_.front().d(); }
  CandidateSource source() const noexcept { return source_; }

  const std::vector<StiefelFrame>& frames() const noexcept { return frames_; }
  const StiefelFrame& operator[](std::size_t i) const { return frames_.at(i); }
  Projector projector(std::size_t i) const { return frame_to_projector(frames_.at(i)); }

  /// All frames stacked vertically: rows [l·k, (l+1)·k) belong to element l.
  const Eigen::MatrixXd& stacked() const noexcept { return stacked_; }

  /// ‖p_l y‖² for every element.
  Eigen::VectorXd projected_sq_norms(const Eigen::VectorXd& y) const;

  /// Index of the element closest to the projector of `probe` in Frobenius
  /// norm (lowest index on ties) together with that distance.
  std::pair<std::size_t, double> nearest(const StiefelFrame& probe) const;

 private:
  std::vector<StiefelFrame> frames_;
  CandidateSource source_;
  Eigen::MatrixXd stacked_;
};

CandidateSet sample_candidate_set(std::size_t k, std::size_t d, std::size_t n, std::uint64_t seed);

/// Lines in R² at angles jπ/n, j = 0..n−1. A 2-design in G_{1,2} for n ≥ 3.
CandidateSet equiangular_lines(std::size_t n);

/// The six diagonals of the icosahedron as a set in G_{1,3} (a 2-design).
CandidateSet icosahedral_lines();

/// Lower estimate of sup_p min_l ‖p − p_l‖_F from n_probe Haar probes.
/// Probes are drawn sequentially from `seed`, so a larger n_probe extends the
/// same stream and the estimate is monotone in n_probe.
double covering_radius_estimate(const CandidateSet& set, std::size_t n_probe, std::uint64_t seed);
double covering_radius_estimate(const CandidateSet& set, std::span<const StiefelFrame> probes);

struct CubatureReport {
  bool passed = false;
  /// Largest relative deviation between set averages and λ_{k,d} moments.
  double max_deviation = 0.0;
  int strength = 1;
};

inline constexpr double kCubatureTolerance = 1e-8;

/// Randomized check of the cubature property up to `strength` (1 or 2): for
/// each trial pair of Gaussian (y, z), compares set averages of ‖p y‖² (and of
/// ‖p y‖²‖p z‖² for strength 2) against their exact λ_{k,d} expectations.
CubatureReport cubature_strength_test(const CandidateSet& set, int strength, std::size_t trial_vectors,
                                      std::uint64_t seed, double tolerance = kCubatureTolerance);

nlohmann::json design_to_json(const CandidateSet& set);
CandidateSet design_from_json(const nlohmann::json& j, CandidateSource source = CandidateSource::file);

CandidateSet load_design(const std::filesystem::path& path);
void save_design(const CandidateSet& set, const std::filesystem::path& path);

}  // namespace orthoproj
