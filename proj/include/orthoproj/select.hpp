#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orthoproj/designs.hpp"
#include "orthoproj/objectives.hpp"
#include "orthoproj/point_cloud.hpp"

namespace orthoproj {

/// Projector-selection heuristics balancing variance and relative distances.
enum class SelectionRule {
  cross,     ///< closest to the expectations (M, tvar) = (1, (k/d) tvar(x))
  diamond,   ///< M ≈ 1, maximal tvar
  square,    ///< M ≈ 1, minimal tvar
  circle,    ///< tvar ≈ tvar of the diamond choice, maximal M
  star,      ///< minimal tvar
  pca_star,  ///< maximal tvar
};

std::string_view to_string(SelectionRule rule) noexcept;
SelectionRule parse_selection_rule(std::string_view name);

struct SelectionOptions {
  /// Absolute half-width of the "M ≈ 1" band. When empty, the 10th
  /// percentile of |M_l − 1| over the set.
  std::optional<double> m_tol;
  /// Relative half-width of the "tvar ≈ tvar(diamond)" band.
  double tvar_rel_tol = 0.01;
};

struct SelectionResult {
  std::size_t chosen_index = 0;
  SelectionRule label = SelectionRule::cross;
  ProjectionSummary summary;
};

nlohmann::json to_json(const SelectionResult& r);

/// One summary per candidate, in candidate order.
std::vector<std::pair<std::size_t, ProjectionSummary>> pareto_scan(const PairwiseGeometry& g, const CandidateSet& set);
std::vector<std::pair<std::size_t, ProjectionSummary>> pareto_scan(const PointCloud& x, const CandidateSet& set);

/// Default M band: 10th percentile (linear interpolation) of |M_l − 1|.
double default_m_tolerance(std::span<const std::pair<std::size_t, ProjectionSummary>> scan);

/// Applies `rule` to precomputed summaries. tvar_x is tvar of the unprojected
/// data; k and d fix the expected projected variance (k/d) tvar_x.
/// Ties go to the lowest index. Throws band_empty when a band has no member.
SelectionResult select_from_scan(std::span<const std::pair<std::size_t, ProjectionSummary>> scan, SelectionRule rule,
                                 double tvar_x, std::size_t k, std::size_t d, const SelectionOptions& options = {});

SelectionResult select(const PointCloud& x, const CandidateSet& set, SelectionRule rule,
                       const SelectionOptions& options = {});

}  // namespace orthoproj
