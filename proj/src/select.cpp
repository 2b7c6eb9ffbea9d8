#include "orthoproj/select.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orthoproj/error.hpp"

namespace orthoproj {

namespace {

using Scan = std::span<const std::pair<std::size_t, ProjectionSummary>>;

// Strict comparison keeps the first (lowest-index) candidate on ties.
template <typename InBand, typename Better>
std::size_t best_position(Scan scan, InBand in_band, Better better) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (!in_band(scan[i].second)) continue;
    if (!best || better(scan[i].second, scan[*best].second)) best = i;
  }
  if (!best) throw Error(ErrorCode::band_empty, "no candidate inside the tolerance band; try a larger --m-tol");
  return *best;
}

}  // namespace

std::string_view to_string(SelectionRule rule) noexcept {
  switch (rule) {
    case SelectionRule::cross: return "cross";
    case SelectionRule::diamond: return "diamond";
    case SelectionRule::square: return "square";
    case SelectionRule::circle: return "circle";
    case SelectionRule::star: return "star";
    case SelectionRule::pca_star: return "pca_star";
  }
  return "unknown";
}

SelectionRule parse_selection_rule(std::string_view name) {
  for (auto rule : {SelectionRule::cross, SelectionRule::diamond, SelectionRule::square, SelectionRule::circle,
                    SelectionRule::star, SelectionRule::pca_star})
    if (to_string(rule) == name) return rule;
  throw Error(ErrorCode::invalid_argument, "unknown selection rule '" + std::string(name) + "'");
}

nlohmann::json to_json(const SelectionResult& r) {
  return {{"chosen_index", r.chosen_index}, {"label", to_string(r.label)}, {"summary", to_json(r.summary)}};
}

std::vector<std::pair<std::size_t, ProjectionSummary>> pareto_scan(const PairwiseGeometry& g, const CandidateSet& set) {
  if (g.d() != set.d())
    throw Error(ErrorCode::dimension_mismatch, "data dimension " + std::to_string(g.d()) +
                                                   " vs candidate dimension " + std::to_string(set.d()));
  std::vector<std::pair<std::size_t, ProjectionSummary>> out;
  out.reserve(set.size());
  for (std::size_t l = 0; l < set.size(); ++l) out.emplace_back(l, summarize(g, set[l]));
  return out;
}

std::vector<std::pair<std::size_t, ProjectionSummary>> pareto_scan(const PointCloud& x, const CandidateSet& set) {
  return pareto_scan(PairwiseGeometry(x), set);
}

double default_m_tolerance(Scan scan) {
  if (scan.empty()) throw Error(ErrorCode::invalid_argument, "empty scan");
  std::vector<double> dev;
  dev.reserve(scan.size());
  for (const auto& [idx, s] : scan) dev.push_back(std::abs(s.mean_rel_dist - 1.0));
  std::sort(dev.begin(), dev.end());
  const double pos = 0.1 * static_cast<double>(dev.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, dev.size() - 1);
  return dev[lo] + (pos - static_cast<double>(lo)) * (dev[hi] - dev[lo]);
}

SelectionResult select_from_scan(Scan scan, SelectionRule rule, double tvar_x, std::size_t k, std::size_t d,
                                 const SelectionOptions& options) {
  if (scan.empty()) throw Error(ErrorCode::invalid_argument, "candidate set is empty");
  const auto any = [](const ProjectionSummary&) { return true; };
  const auto higher_tvar = [](const ProjectionSummary& a, const ProjectionSummary& b) { return a.tvar > b.tvar; };
  const auto lower_tvar = [](const ProjectionSummary& a, const ProjectionSummary& b) { return a.tvar < b.tvar; };

  const double m_tol = options.m_tol ? *options.m_tol : default_m_tolerance(scan);
  if (!(m_tol >= 0.0)) throw Error(ErrorCode::invalid_argument, "m_tol must be nonnegative");
  const auto m_band = [m_tol](const ProjectionSummary& s) { return std::abs(s.mean_rel_dist - 1.0) <= m_tol; };

  std::size_t pos = 0;
  switch (rule) {
    case SelectionRule::cross: {
      const double expected_tvar = static_cast<double>(k) / static_cast<double>(d) * tvar_x;
      const auto dist = [&](const ProjectionSummary& s) {
        return std::hypot(s.mean_rel_dist - 1.0, (s.tvar - expected_tvar) / tvar_x);
      };
      pos = best_position(scan, any, [&](const auto& a, const auto& b) { return dist(a) < dist(b); });
      break;
    }
    case SelectionRule::diamond: pos = best_position(scan, m_band, higher_tvar); break;
    case SelectionRule::square: pos = best_position(scan, m_band, lower_tvar); break;
    case SelectionRule::circle: {
      const double target = scan[best_position(scan, m_band, higher_tvar)].second.tvar;
      const double rel = options.tvar_rel_tol;
      const auto tvar_band = [target, rel](const ProjectionSummary& s) {
        return std::abs(s.tvar - target) <= rel * target;
      };
      pos = best_position(scan, tvar_band, [](const auto& a, const auto& b) {
        return a.mean_rel_dist > b.mean_rel_dist;
      });
      break;
    }
    case SelectionRule::star: pos = best_position(scan, any, lower_tvar); break;
    case SelectionRule::pca_star: pos = best_position(scan, any, higher_tvar); break;
  }
  return SelectionResult{scan[pos].first, rule, scan[pos].second};
}

SelectionResult select(const PointCloud& x, const CandidateSet& set, SelectionRule rule,
                       const SelectionOptions& options) {
  const PairwiseGeometry g(x);
  const auto scan = pareto_scan(g, set);
  return select_from_scan(scan, rule, total_variance(x), set.k(), set.d(), options);
}

}  // namespace orthoproj
