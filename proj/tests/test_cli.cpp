#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthoproj/cli.hpp"
#include "orthoproj/designs.hpp"
#include "orthoproj/serialization.hpp"
#include "support.hpp"

using orthoproj::cli::run;
using nlohmann::json;

namespace {

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("orthoproj_cli_" + name)).string();
}

json error_of(const orthoproj::cli::RunOutput& r) { return json::parse(r.err)["error"]; }

const std::string kIris = testing::data_file("iris.csv");
const std::string kFive = testing::data_file("designs/g12_equiangular5.json");

}  // namespace

TEST_CASE("version") {
  const auto r = run({"--version"});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
  CHECK(r.out.find("format 1") != std::string::npos);
}

TEST_CASE("moments on iris") {
  const auto r = run({"moments", "--data", kIris, "--k", "2"});
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["m"] == 149);
  CHECK(j["dropped_duplicates"] == 1);
  CHECK(std::abs(j["moments"]["corr_M_tvar"].get<double>() - 0.98) <= 0.015);
  const auto keep = run({"moments", "--data", kIris, "--k", "2", "--keep-duplicates"});
  CHECK(keep.exit_code != 0);
  CHECK(error_of(keep)["code"] == "coincident_points");
}

TEST_CASE("scan is deterministic and sized by the sample count") {
  const std::vector<std::string> args{"scan", "--data", kIris, "--k", "2", "--sample", "300", "--seed", "7"};
  const auto a = run(args), b = run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("index,tvar,M,V\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 301);
  const auto other = run({"scan", "--data", kIris, "--k", "2", "--sample", "300", "--seed", "8"});
  CHECK(other.out != a.out);

  const auto path = tmp("scan.csv");
  CHECK(run({"scan", "--data", kIris, "--k", "2", "--sample", "300", "--seed", "7", "--out", path}).out.empty());
  CHECK(orthoproj::read_text_file(path) == a.out);
  std::filesystem::remove(path);
}

TEST_CASE("stochastic commands demand a seed") {
  const auto r = run({"scan", "--data", kIris, "--k", "2", "--sample", "10"});
  CHECK(r.exit_code != 0);
  CHECK(error_of(r)["code"] == "invalid_argument");
  CHECK(run({"sample", "--k", "1", "--d", "3", "--count", "4"}).exit_code != 0);
  CHECK(run({"design", "radius", "--design", kFive}).exit_code != 0);
}

TEST_CASE("jl-check") {
  const auto r = run({"jl-check", "--m", "100", "--epsilon", "0.5"});
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(r.out)["k_min"] == 222);
  const auto t = json::parse(run({"jl-check", "--m", "50", "--epsilon", "0.5", "--tau", "1"}).out);
  CHECK(t["k_min_random"] == 282);
  CHECK(error_of(run({"jl-check", "--m", "100", "--epsilon", "1.5"}))["code"] == "invalid_argument");
}

TEST_CASE("sample, select and frame output") {
  const auto design = tmp("design.json"), frame = tmp("frame.json");
  REQUIRE(run({"sample", "--k", "2", "--d", "4", "--count", "200", "--seed", "5", "--out", design}).exit_code == 0);
  const auto r = run({"select", "--rule", "diamond", "--data", kIris, "--design", design, "--frame-out", frame});
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["label"] == "diamond");
  const auto chosen = orthoproj::frame_from_json(json::parse(orthoproj::read_text_file(frame)));
  const auto set = orthoproj::load_design(design);
  CHECK(chosen == set[j["chosen_index"].get<std::size_t>()]);
  CHECK(run({"select", "--rule", "square", "--data", kIris, "--k", "2", "--sample", "50", "--seed", "2"}).exit_code == 0);
  const auto bad = run({"select", "--rule", "oval", "--data", kIris, "--design", design});
  CHECK(bad.exit_code != 0);
  const auto band = run({"select", "--rule", "diamond", "--data", kIris, "--design", design, "--m-tol", "0"});
  CHECK(error_of(band)["code"] == "band_empty");
  std::filesystem::remove(design);
  std::filesystem::remove(frame);
}

TEST_CASE("design validate and radius") {
  const json v = json::parse(run({"design", "validate", "--design", kFive, "--strength", "2", "--seed", "1"}).out);
  CHECK(v["passed"] == true);
  const json r = json::parse(run({"design", "radius", "--design", kFive, "--probes", "20000", "--seed", "3"}).out);
  CHECK(std::abs(r["covering_radius"].get<double>() - 0.43701603) < 1e-3);
}

TEST_CASE("atloss eval") {
  const auto spec = tmp("spec.json"), y = tmp("y.csv"), yhat = tmp("yhat.csv");
  orthoproj::write_text_file(spec, R"({"base_loss":"mse","alpha":0.5,"image_shape":[2,3],
    "transforms":[{"name":"prewitt"},{"name":"log"}],"projector":{"policy":"resample","k":1}})");
  testing::Gen gen(1);
  orthoproj::write_text_file(y, orthoproj::matrix_to_csv(gen.matrix(4, 6)));
  orthoproj::write_text_file(yhat, orthoproj::matrix_to_csv(gen.matrix(4, 6)));
  const auto missing = run({"atloss", "eval", "--spec", spec, "--y", y, "--yhat", yhat});
  CHECK(missing.exit_code != 0);
  const auto a = run({"atloss", "eval", "--spec", spec, "--y", y, "--yhat", yhat, "--seed", "4"});
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == run({"atloss", "eval", "--spec", spec, "--y", y, "--yhat", yhat, "--seed", "4"}).out);
  const json j = json::parse(a.out);
  CHECK(j["value"].get<double>() > 0.0);
  CHECK(j["gradient_norm"].get<double>() > 0.0);
  orthoproj::write_text_file(spec, "{not json");
  CHECK(error_of(run({"atloss", "eval", "--spec", spec, "--y", y, "--yhat", yhat}))["code"] == "parse_error");
  for (const auto& p : {spec, y, yhat}) std::filesystem::remove(p);
}

TEST_CASE("bad input files produce error JSON") {
  const auto ragged = tmp("ragged.csv");
  orthoproj::write_text_file(ragged, "a,b\n1,2\n3\n");
  const auto r = run({"moments", "--data", ragged, "--k", "1"});
  CHECK(r.exit_code != 0);
  CHECK(error_of(r)["code"] == "parse_error");
  CHECK(error_of(r)["message"].get<std::string>().find("line 3") != std::string::npos);
  std::filesystem::remove(ragged);
  CHECK(error_of(run({"moments", "--data", tmp("nope.csv"), "--k", "1"}))["code"] == "io_error");
  CHECK(run({"moments", "--k", "1"}).exit_code != 0);
  CHECK(run({}).exit_code != 0);
}
