#include "orthoproj/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "orthoproj/atloss.hpp"
#include "orthoproj/designs.hpp"
#include "orthoproj/error.hpp"
#include "orthoproj/grassmann.hpp"
#include "orthoproj/moments.hpp"
#include "orthoproj/objectives.hpp"
#include "orthoproj/point_cloud.hpp"
#include "orthoproj/select.hpp"
#include "orthoproj/serialization.hpp"

namespace orthoproj::cli {

namespace {

using nlohmann::json;

std::string version_string() {
  return std::string("orthoproj ") + ORTHOPROJ_VERSION + " (format " + std::to_string(kFormatVersion) + ")";
}

std::string error_json(std::string_view code, std::string_view message) {
  json j;
  j["error"] = {{"code", code}, {"message", message}};
  return j.dump(2) + "\n";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct DataOptions {
  std::string path;
  bool keep_duplicates = false;
};

struct Loaded {
  PointCloud cloud;
  std::size_t dropped = 0;
};

// Repeated rows are dropped unless --keep-duplicates.
Loaded load_data(const DataOptions& opt) {
  PointCloud raw = read_point_cloud_csv(opt.path);
  if (opt.keep_duplicates) return {raw, 0};
  PointCloud unique = raw.without_duplicates();
  const std::size_t dropped = raw.size() - unique.size();
  return {std::move(unique), dropped};
}

void add_data(CLI::App* cmd, DataOptions& opt) {
  cmd->add_option("--data", opt.path, "numeric CSV, one point per row")->required();
  cmd->add_flag("--keep-duplicates", opt.keep_duplicates, "do not drop repeated rows");
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed, std::string_view what) {
  if (!seed) throw Error(ErrorCode::invalid_argument, "--seed is required for " + std::string(what));
  return *seed;
}

CandidateSet candidates(const std::optional<std::string>& design, const std::optional<std::size_t>& sample,
                        const std::optional<std::uint64_t>& seed, std::size_t k, std::size_t d) {
  if (design && sample) throw Error(ErrorCode::invalid_argument, "give either --design or --sample, not both");
  if (design) {
    CandidateSet set = load_design(*design);
    if (set.k() != k || set.d() != d)
      throw Error(ErrorCode::dimension_mismatch, "design lives in G_{" + std::to_string(set.k()) + "," +
                                                     std::to_string(set.d()) + "}, expected G_{" + std::to_string(k) +
                                                     "," + std::to_string(d) + "}");
    return set;
  }
  if (!sample) throw Error(ErrorCode::invalid_argument, "one of --design or --sample is required");
  return sample_candidate_set(k, d, *sample, require_seed(seed, "--sample"));
}

}  // namespace

RunOutput run(const std::vector<std::string>& args) {
  CLI::App app{"Orthogonal projections: variance versus relative distances"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  std::optional<std::string> out_path;
  auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out_path, "write the result here instead of stdout"); };

  DataOptions data;
  std::size_t k = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> design_path;
  std::optional<std::size_t> sample_count;

  auto* moments_cmd = app.add_subcommand("moments", "closed-form moments of tvar, M, V");
  add_data(moments_cmd, data);
  moments_cmd->add_option("--k", k)->required();
  add_out(moments_cmd);

  auto* scan_cmd = app.add_subcommand("scan", "CSV of (index, tvar, M, V) over candidate projectors");
  add_data(scan_cmd, data);
  scan_cmd->add_option("--k", k)->required();
  scan_cmd->add_option("--design", design_path);
  scan_cmd->add_option("--sample", sample_count);
  scan_cmd->add_option("--seed", seed);
  add_out(scan_cmd);

  std::string rule_name;
  std::optional<double> m_tol;
  double tvar_tol = 0.01;
  std::optional<std::string> frame_out;
  auto* select_cmd = app.add_subcommand("select", "pick a projector by rule");
  select_cmd->add_option("--rule", rule_name, "cross|diamond|square|circle|star|pca_star")->required();
  add_data(select_cmd, data);
  select_cmd->add_option("--k", k);
  select_cmd->add_option("--design", design_path);
  select_cmd->add_option("--sample", sample_count);
  select_cmd->add_option("--seed", seed);
  select_cmd->add_option("--m-tol", m_tol);
  select_cmd->add_option("--tvar-tol", tvar_tol);
  select_cmd->add_option("--frame-out", frame_out);
  add_out(select_cmd);

  std::size_t d = 0;
  std::size_t count = 0;
  auto* sample_cmd = app.add_subcommand("sample", "Haar-distributed frames as a design file");
  sample_cmd->add_option("--k", k)->required();
  sample_cmd->add_option("--d", d)->required();
  sample_cmd->add_option("--count", count)->required();
  sample_cmd->add_option("--seed", seed);
  add_out(sample_cmd);

  auto* design_cmd = app.add_subcommand("design", "design checks");
  design_cmd->require_subcommand(1);
  int strength = 2;
  std::size_t trials = 32;
  double tol = kCubatureTolerance;
  auto* validate_cmd = design_cmd->add_subcommand("validate", "cubature strength test");
  validate_cmd->add_option("--design", design_path)->required();
  validate_cmd->add_option("--strength", strength)->check(CLI::IsMember({1, 2}));
  validate_cmd->add_option("--trials", trials);
  validate_cmd->add_option("--seed", seed);
  validate_cmd->add_option("--tol", tol);
  add_out(validate_cmd);
  std::size_t probes = 10000;
  auto* radius_cmd = design_cmd->add_subcommand("radius", "Monte Carlo covering radius");
  radius_cmd->add_option("--design", design_path)->required();
  radius_cmd->add_option("--probes", probes);
  radius_cmd->add_option("--seed", seed);
  add_out(radius_cmd);

  std::size_t m = 0;
  double epsilon = 0.0;
  std::optional<double> tau;
  auto* jl_cmd = app.add_subcommand("jl-check", "minimal target dimension for distance preservation");
  jl_cmd->add_option("--m", m)->required();
  jl_cmd->add_option("--epsilon", epsilon)->required();
  jl_cmd->add_option("--tau", tau);
  add_out(jl_cmd);

  std::string spec_path, y_path, yhat_path;
  auto* atloss_cmd = app.add_subcommand("atloss", "augmented target loss");
  atloss_cmd->require_subcommand(1);
  auto* eval_cmd = atloss_cmd->add_subcommand("eval", "loss value and gradient norm");
  eval_cmd->add_option("--spec", spec_path)->required();
  eval_cmd->add_option("--y", y_path)->required();
  eval_cmd->add_option("--yhat", yhat_path)->required();
  eval_cmd->add_option("--seed", seed);
  add_out(eval_cmd);

  RunOutput result;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    result.exit_code = code;
    if (code == 0) {
      result.out = o.str();
    } else {
      result.err = error_json("invalid_argument", e.what());
    }
    return result;
  }

  try {
    std::string text;
    if (moments_cmd->parsed()) {
      const Loaded loaded = load_data(data);
      json j;
      j["m"] = loaded.cloud.size();
      j["d"] = loaded.cloud.dim();
      j["k"] = k;
      j["dropped_duplicates"] = loaded.dropped;
      j["tvar"] = total_variance(loaded.cloud);
      j["moments"] = to_json(closed_form_moments(loaded.cloud, k));
      text = dump(j);
    } else if (scan_cmd->parsed()) {
      const Loaded loaded = load_data(data);
      const CandidateSet set = candidates(design_path, sample_count, seed, k, loaded.cloud.dim());
      std::string csv = "index,tvar,M,V\n";
      for (const auto& [index, s] : pareto_scan(loaded.cloud, set))
        csv += std::to_string(index) + "," + format_double(s.tvar) + "," + format_double(s.mean_rel_dist) + "," +
               format_double(s.var_rel_dist) + "\n";
      text = std::move(csv);
    } else if (select_cmd->parsed()) {
      const SelectionRule rule = parse_selection_rule(rule_name);
      const Loaded loaded = load_data(data);
      std::optional<CandidateSet> set;
      if (design_path && !sample_count) {
        set = load_design(*design_path);
        if (set->d() != loaded.cloud.dim())
          throw Error(ErrorCode::dimension_mismatch, "design ambient dimension " + std::to_string(set->d()) +
                                                         " differs from data dimension " +
                                                         std::to_string(loaded.cloud.dim()));
      } else {
        if (k == 0) throw Error(ErrorCode::invalid_argument, "--k is required with --sample");
        set = candidates(design_path, sample_count, seed, k, loaded.cloud.dim());
      }
      SelectionOptions options;
      options.m_tol = m_tol;
      options.tvar_rel_tol = tvar_tol;
      const SelectionResult r = select(loaded.cloud, *set, rule, options);
      json j = to_json(r);
      j["frame"] = frame_to_json((*set)[r.chosen_index]);
      if (frame_out) write_text_file(*frame_out, dump(frame_to_json((*set)[r.chosen_index])));
      text = dump(j);
    } else if (sample_cmd->parsed()) {
      text = dump(design_to_json(sample_candidate_set(k, d, count, require_seed(seed, "sample"))));
    } else if (validate_cmd->parsed()) {
      const CandidateSet set = load_design(*design_path);
      const CubatureReport r =
          cubature_strength_test(set, strength, trials, require_seed(seed, "design validate"), tol);
      text = dump(json{{"passed", r.passed},
                       {"max_deviation", r.max_deviation},
                       {"strength", strength},
                       {"size", set.size()},
                       {"k", set.k()},
                       {"d", set.d()}});
    } else if (radius_cmd->parsed()) {
      const CandidateSet set = load_design(*design_path);
      const double radius = covering_radius_estimate(set, probes, require_seed(seed, "design radius"));
      text = dump(json{{"covering_radius", radius}, {"probes", probes}, {"size", set.size()}});
    } else if (jl_cmd->parsed()) {
      json j{{"m", m}, {"epsilon", epsilon}, {"k_min", jl_min_dimension(m, epsilon)}};
      if (tau) {
        const JLParams p = JLParams::for_random_projection(m, epsilon, *tau);
        j["tau"] = *tau;
        j["k_min_random"] = p.k_min;
        j["success_probability"] = p.success_probability();
      }
      text = dump(j);
    } else if (eval_cmd->parsed()) {
      json spec_json;
      try {
        spec_json = json::parse(read_text_file(spec_path));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, spec_path + ": " + e.what());
      }
      ATLossConfig cfg = atloss_config_from_json(spec_json);
      const Batch y = parse_numeric_csv(read_text_file(y_path), y_path);
      const Batch yhat = parse_numeric_csv(read_text_file(yhat_path), yhat_path);
      std::optional<SeedStream> stream;
      const std::optional<std::uint64_t> s = seed ? seed : cfg.seed;
      if (std::holds_alternative<ResamplePolicy>(cfg.spec.policy))
        stream.emplace(require_seed(s, "the resample projector policy"));
      const LossEvaluation ev = evaluate(cfg.spec, cfg.stack, y, yhat, stream ? &*stream : nullptr);
      text = dump(json{{"value", ev.value},
                       {"gradient_norm", ev.gradient.norm()},
                       {"projector_rank", ev.projector.k()},
                       {"m", y.rows()}});
    }

    if (out_path) {
      write_text_file(*out_path, text);
    } else {
      result.out = std::move(text);
    }
  } catch (const Error& e) {
    result.exit_code = 1;
    result.err = error_json(to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    result.exit_code = 1;
    result.err = error_json("parse_error", e.what());
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.err = error_json("internal", e.what());
  }
  return result;
}

}  // namespace orthoproj::cli
