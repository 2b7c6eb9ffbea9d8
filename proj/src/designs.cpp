#include "orthoproj/designs.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "orthoproj/error.hpp"
#include "orthoproj/moments.hpp"
#include "orthoproj/serialization.hpp"

namespace orthoproj {

CandidateSet::CandidateSet(std::vector<StiefelFrame> frames, CandidateSource source)
    : frames_(std::move(frames)), source_(source) {
  if (frames_.empty()) throw Error(ErrorCode::invalid_argument, "candidate set is empty");
  const auto k = static_cast<Eigen::Index>(frames_.front().k());
  const auto d = static_cast<Eigen::Index>(frames_.front().d());
  stacked_.resize(k * static_cast<Eigen::Index>(frames_.size()), d);
  for (std::size_t l = 0; l < frames_.size(); ++l) {
    const auto& f = frames_[l];
    if (static_cast<Eigen::Index>(f.k()) != k || static_cast<Eigen::Index>(f.d()) != d)
      throw Error(ErrorCode::invariant_violation, "frame " + std::to_string(l) + " is " + std::to_string(f.k()) +
                                                      "x" + std::to_string(f.d()) + ", set is " +
                                                      std::to_string(k) + "x" + std::to_string(d));
    stacked_.middleRows(static_cast<Eigen::Index>(l) * k, k) = f.rows();
  }
}

Eigen::VectorXd CandidateSet::projected_sq_norms(const Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(y.size()) != d()) throw Error(ErrorCode::dimension_mismatch, "vector has wrong dimension");
  const Eigen::VectorXd coeffs = stacked_ * y;
  const auto k = static_cast<Eigen::Index>(this->k());
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (Eigen::Index l = 0; l < out.size(); ++l) out(l) = coeffs.segment(l * k, k).squaredNorm();
  return out;
}

std::pair<std::size_t, double> CandidateSet::nearest(const StiefelFrame& probe) const {
  if (probe.k() != k() || probe.d() != d())
    throw Error(ErrorCode::dimension_mismatch, "probe lives in a different Grassmannian");
  // ⟨p, p_l⟩_F = ‖q q_lᵀ‖_F², so the closest element maximizes that overlap.
  const Eigen::MatrixXd overlaps = stacked_ * probe.rows().transpose();
  const auto k = static_cast<Eigen::Index>(this->k());
  std::size_t best = 0;
  double best_overlap = -1.0;
  for (std::size_t l = 0; l < size(); ++l) {
    const double o = overlaps.middleRows(static_cast<Eigen::Index>(l) * k, k).squaredNorm();
    if (o > best_overlap) {
      best_overlap = o;
      best = l;
    }
  }
  const Eigen::MatrixXd& q = probe.rows();
  const Eigen::MatrixXd& ql = frames_[best].rows();
  const double dist = (q.transpose() * q - ql.transpose() * ql).norm();
  return {best, dist};
}

CandidateSet sample_candidate_set(std::size_t k, std::size_t d, std::size_t n, std::uint64_t seed) {
  return CandidateSet(haar_samples(k, d, n, seed), CandidateSource::haar_sample);
}

CandidateSet equiangular_lines(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "need at least one line");
  std::vector<StiefelFrame> frames;
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    Eigen::MatrixXd row(1, 2);
    row << std::cos(theta), std::sin(theta);
    frames.push_back(StiefelFrame::from_rows(std::move(row)));
  }
  return CandidateSet(std::move(frames), CandidateSource::synthetic);
}

CandidateSet icosahedral_lines() {
  const double phi = std::numbers::phi;
  const double directions[6][3] = {{0, 1, phi}, {0, 1, -phi}, {1, phi, 0}, {1, -phi, 0}, {phi, 0, 1}, {-phi, 0, 1}};
  std::vector<StiefelFrame> frames;
  for (const auto& v : directions) {
    Eigen::MatrixXd row(1, 3);
    row << v[0], v[1], v[2];
    row /= row.norm();
    frames.push_back(StiefelFrame::from_rows(std::move(row)));
  }
  return CandidateSet(std::move(frames), CandidateSource::synthetic);
}

double covering_radius_estimate(const CandidateSet& set, std::span<const StiefelFrame> probes) {
  double worst = 0.0;
  for (const auto& probe : probes) worst = std::max(worst, set.nearest(probe).second);
  return worst;
}

double covering_radius_estimate(const CandidateSet& set, std::size_t n_probe, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < n_probe; ++i)
    worst = std::max(worst, set.nearest(haar_sample(set.k(), set.d(), rng)).second);
  return worst;
}

CubatureReport cubature_strength_test(const CandidateSet& set, int strength, std::size_t trial_vectors,
                                      std::uint64_t seed, double tolerance) {
  if (strength != 1 && strength != 2) throw Error(ErrorCode::invalid_argument, "strength must be 1 or 2");
  if (trial_vectors == 0) throw Error(ErrorCode::invalid_argument, "need at least one trial vector pair");
  const std::size_t k = set.k();
  const auto d = static_cast<Eigen::Index>(set.d());
  Rng rng = make_rng(seed);
  Eigen::MatrixXd yz(2, d);
  CubatureReport report;
  report.strength = strength;
  for (std::size_t t = 0; t < trial_vectors; ++t) {
    fill_standard_normal(rng, yz);
    const Eigen::VectorXd y = yz.row(0).transpose();
    const Eigen::VectorXd z = yz.row(1).transpose();
    const Eigen::VectorXd ny = set.projected_sq_norms(y);
    report.max_deviation = std::max(report.max_deviation, make_report(ny.mean(), expected_sq_norm(y, k)).rel_err);
    if (strength == 2) {
      const Eigen::VectorXd nz = set.projected_sq_norms(z);
      const double avg = ny.cwiseProduct(nz).mean();
      report.max_deviation =
          std::max(report.max_deviation, make_report(avg, expected_sq_norm_product(y, z, k)).rel_err);
    }
  }
  report.passed = report.max_deviation <= tolerance;
  return report;
}

nlohmann::json design_to_json(const CandidateSet& set) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : set.frames()) arr.push_back(frame_to_json(f));
  return arr;
}

CandidateSet design_from_json(const nlohmann::json& j, CandidateSource source) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, "design file must hold a JSON array of frames");
  std::vector<StiefelFrame> frames;
  frames.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      frames.push_back(frame_from_json(j[i]));
    } catch (const Error& e) {
      throw Error(e.code(), "frame " + std::to_string(i) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse_error, "frame " + std::to_string(i) + ": " + e.what());
    }
  }
  return CandidateSet(std::move(frames), source);
}

CandidateSet load_design(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
  return design_from_json(j, CandidateSource::file);
}

void save_design(const CandidateSet& set, const std::filesystem::path& path) {
  write_text_file(path, design_to_json(set).dump() + "\n");
}

}  // namespace orthoproj
