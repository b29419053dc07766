#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gls/cli.hpp"
#include "gls/config.hpp"
#include "gls/errors.hpp"
#include "json.hpp"

using namespace gls;
namespace fs = std::filesystem;

namespace {

const std::string kData = GLS_TEST_DATA_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run glsdim(std::vector<std::string> args) {
  args.insert(args.begin(), "glsdim");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gls_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_config(const std::string& name, const std::string& body) {
  const auto p = scratch(name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("codec commands") {
  auto r = glsdim({"encode", "--scheme", data("luroth.json"), "--x", "0.5", "--n", "3"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out == "1,0,0\n");
  r = glsdim({"--scheme", data("luroth.json"), "decode", "--digits", "1"});
  CHECK(r.out == "0.5\n");
  r = glsdim({"decode", "--scheme", data("luroth.json"), "--digits", "0,1"});
  CHECK(r.out == "0.25\n");
  r = glsdim({"encode", "--scheme", data("luroth.json"), "--x", "1", "--n", "2"});
  CHECK(r.code == cli::kDeltaInfinity);
  CHECK(r.err.find("DeltaInfinity") != std::string::npos);
  CHECK(glsdim({"encode", "--scheme", data("luroth.json"), "--x", "1.5", "--n", "2"}).code == cli::kConfigError);
  CHECK(glsdim({"decode", "--scheme", data("halves.json"), "--digits", "0,2"}).code == cli::kConfigError);
}

TEST_CASE("dim command") {
  auto r = glsdim({"dim", "--scheme", data("thirds.json"), "--V", "only:0,2"});
  REQUIRE(r.code == cli::kOk);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("value").get<double>() == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-10));
  CHECK(j.at("method") == "finite_root");
  CHECK(j.at("bracket").size() == 2);

  r = glsdim({"dim", "--scheme", data("geometric05.json"), "--V", "exclude:0", "--tol", "1e-9"});
  j = nlohmann::json::parse(r.out);
  CHECK(j.at("value").get<double>() == doctest::Approx(0.6942419136306172).epsilon(1e-8));
  CHECK(j.at("flags").dump().find("LimitAgrees") != std::string::npos);

  CHECK(glsdim({"dim", "--scheme", data("loglog.json"), "--V", "exclude:0", "--method", "root"}).code ==
        cli::kNoRoot);
  CHECK(glsdim({"dim", "--scheme", data("luroth.json"), "--V", "bogus"}).code == cli::kConfigError);
  CHECK(glsdim({"dim", "--scheme", data("luroth.json"), "--method", "magic"}).code == cli::kConfigError);
  CHECK(glsdim({"dim", "--V", "all"}).code == cli::kConfigError);
}

TEST_CASE("config rejection") {
  CHECK_THROWS_AS(load_scheme(data("bad_mass.json")), NormalizationError);
  auto expect_field = [](const std::string& body, const std::string& field) {
    try {
      (void)scheme_from_json(nlohmann::json::parse(body));
      FAIL("accepted " << body);
    } catch (const ConfigError& e) {
      CHECK(e.field() == field);
    }
  };
  expect_field(R"({"weights":{"kind":"luroth","colour":1}})", "weights.colour");
  expect_field(R"({"weights":{"kind":"luroth","ratio":0.5}})", "weights.ratio");
  expect_field(R"({"weights":{"kind":"geometric"}})", "weights.ratio");
  expect_field(R"({"weights":{"kind":"geometric","ratio":2}})", "weights.ratio");
  expect_field(R"({"weights":{"kind":"cantor"}})", "weights.kind");
  expect_field(R"({"placement":{"order":"ascending"}})", "weights");
  expect_field(R"({"weights":{"kind":"luroth"},"extra":0})", "scheme.extra");
  expect_field(R"({"weights":{"kind":"luroth"},"placement":{"order":"permuted","prefix":[0,2]}})",
               "placement.prefix");
  expect_field(R"({"weights":{"kind":"luroth"},"placement":{"order":"sideways"}})", "placement.order");

  const auto bad = write_config("unknown.json", R"({"weights":{"kind":"luroth","x":1}})");
  const auto r = glsdim({"encode", "--scheme", bad.string(), "--x", "0.1", "--n", "1"});
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("weights.x") != std::string::npos);
  CHECK(glsdim({"encode", "--scheme", scratch("missing.json").string(), "--x", "0.1", "--n", "1"}).code ==
        cli::kConfigError);
  CHECK(glsdim({"frobnicate"}).code == cli::kConfigError);
}

TEST_CASE("validate command") {
  auto r = glsdim({"validate", "--scheme", data("luroth_permuted.json")});
  CHECK(r.code == cli::kOk);
  CHECK(nlohmann::json::parse(r.out).at("passed") == true);
  r = glsdim({"validate", "--scheme", data("bad_mass.json")});
  CHECK(r.code == cli::kConfigError);
  CHECK(nlohmann::json::parse(r.out).at("passed") == false);
}

TEST_CASE("sample, boxdim and cdf pipeline") {
  const auto csv = scratch("cantor.csv");
  auto r = glsdim({"sample", "--scheme", data("thirds.json"), "--p", "0:0.5,2:0.5", "--n", "20", "--count",
                   "20000", "--seed", "4", "--out", csv.string()});
  REQUIRE(r.code == cli::kOk);
  const auto meta = nlohmann::json::parse(slurp(csv.string() + ".meta.json"));
  CHECK(meta.at("rng") == "splitmix64");
  CHECK(meta.at("seed") == 4);
  CHECK(meta.at("n") == 20);
  CHECK(meta.at("count") == 20000);
  CHECK(meta.at("scheme").at("weights").at("kind") == "explicit");

  const auto again = scratch("cantor_again.csv");
  glsdim({"sample", "--scheme", data("thirds.json"), "--p", "0:0.5,2:0.5", "--n", "20", "--count", "20000",
          "--seed", "4", "--out", again.string()});
  CHECK(slurp(csv) == slurp(again));

  const auto counts = scratch("counts.csv");
  r = glsdim({"boxdim", "--in", csv.string(), "--scales", "3^-2..3^-7", "--compare", "--out", counts.string()});
  REQUIRE(r.code == cli::kOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::fabs(j.at("difference").get<double>()) <= 0.05);
  CHECK(j.at("theory").get<double>() == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-9));
  CHECK(slurp(counts).rfind("epsilon,count\n", 0) == 0);

  // scales below the sampling resolution are refused
  CHECK(glsdim({"boxdim", "--in", csv.string(), "--scales", "3^-2..3^-30"}).code == cli::kConfigError);

  r = glsdim({"cdf", "--in", csv.string(), "--grid", "5"});
  REQUIRE(r.code == cli::kOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "x,F");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("degenerate box counts exit with their own code") {
  const auto csv = scratch("point.csv");
  glsdim({"sample", "--scheme", data("luroth.json"), "--p", "1:1", "--n", "5", "--count", "50", "--out",
          csv.string()});
  CHECK(glsdim({"boxdim", "--in", csv.string(), "--scales", "2^-1..2^-3"}).code == cli::kDegenerateFit);
}
