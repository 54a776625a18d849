#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using lightcone::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "lightcone_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("bound table has one row per distance") {
  const auto r = call({"bound", "--alpha", "4", "--h", "1", "--delta", "0.5", "--r-min", "4", "--r-max", "64"});
  REQUIRE(r.code == 0);
  CHECK(line_count(r.out) == 62);
  CHECK(r.out.rfind("r,R,regime,b,c1,c2,ts_bound\n", 0) == 0);
  const auto meta = nlohmann::json::parse(r.err);
  CHECK(meta.at("command") == "bound");
  CHECK(meta.at("config").at("alpha") == "4");
  CHECK(meta.contains("version"));
}

TEST_CASE("output is byte deterministic") {
  const std::vector<std::string> args{"bound", "--alpha", "3.5", "--r-min", "2", "--r-max", "40"};
  CHECK(call(args).out == call(args).out);
  const auto dir = scratch();
  const auto a = (dir / "a.csv").string();
  const auto b = (dir / "b.csv").string();
  REQUIRE(call({"--out", a, "curve", "--alpha", "4", "--r", "16"}).code == 0);
  REQUIRE(call({"--out", b, "curve", "--alpha", "4", "--r", "16"}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(line_count(slurp(a)) == 102);
  CHECK(fs::exists(a + ".meta.json"));
  CHECK(nlohmann::json::parse(slurp(a + ".meta.json")).at("command") == "curve");
}

TEST_CASE("usage errors exit 2") {
  CHECK(call({"bound"}).code == 2);
  CHECK(call({"bound", "--alpha", "4", "--bogus", "1"}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"bound", "--alpha", "4", "--delta", "3"}).code == 2);
  CHECK(call({"decompose", "--R", "6"}).code == 2);
  const auto missing = call({"bound", "--h", "1"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("--alpha") != std::string::npos);
}

TEST_CASE("help and version exit 0") {
  CHECK(call({"--help"}).code == 0);
  const auto v = call({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find(lightcone::cli::kVersion) != std::string::npos);
}

TEST_CASE("domain errors exit 1") {
  const auto r = call({"bound", "--alpha", "1.5"});
  CHECK(r.code == 1);
  CHECK(r.err.find("alpha") != std::string::npos);
  CHECK(call({"thresholds", "--alpha-prime", "0.5", "--R", "8"}).code == 1);
  CHECK(call({"--out", "/nonexistent_dir/x.csv", "bound", "--alpha", "4"}).code == 1);
}

TEST_CASE("enumerate coverage report") {
  const auto r = call({"enumerate", "--R", "8", "--max-len", "6", "--alpha-prime", "4", "--check", "coverage"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("checked") == 1 + 11 + 121 + 1331 + 14641 + 161051 + 1771561);
  CHECK(doc.at("counterexamples").empty());
  CHECK(doc.at("meta").at("command") == "enumerate");

  const auto forced = call({"enumerate", "--R", "4", "--max-len", "5", "--alpha-prime", "4",
                            "--check", "coverage", "--threshold-scale", "2"});
  REQUIRE(forced.code == 0);
  CHECK_FALSE(nlohmann::json::parse(forced.out).at("counterexamples").empty());

  const auto counts = call({"enumerate", "--R", "16", "--max-len", "0", "--alpha-prime", "3", "--check", "counts"});
  REQUIRE(counts.code == 0);
  CHECK(nlohmann::json::parse(counts.out).at("counterexamples").empty());
}

TEST_CASE("decompose and thresholds documents") {
  const auto d = call({"decompose", "--R", "4"});
  REQUIRE(d.code == 0);
  CHECK(nlohmann::json::parse(d.out).at("blocks").size() == 4);
  const auto t = call({"thresholds", "--alpha-prime", "4", "--R", "16"});
  REQUIRE(t.code == 0);
  CHECK(nlohmann::json::parse(t.out).at("N") == nlohmann::json::parse("[3,1,1,1]"));
}

TEST_CASE("json table format") {
  const auto r = call({"--format", "json", "bound", "--alpha", "4", "--r-min", "2", "--r-max", "3"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 2);
  CHECK(doc[0].at("r") == 2);
  CHECK(doc[1].at("regime") == "alpha_prime>2");
}

TEST_CASE("config file with flag override") {
  const auto dir = scratch();
  const auto cfg = dir / "bound.json";
  std::ofstream(cfg) << R"({"alpha": 4, "r-min": 4, "r-max": 8, "delta": 0.5})";
  const auto from_file = call({"--config", cfg.string(), "bound"});
  REQUIRE(from_file.code == 0);
  CHECK(line_count(from_file.out) == 6);
  const auto overridden = call({"--config", cfg.string(), "bound", "--r-max", "10"});
  REQUIRE(overridden.code == 0);
  CHECK(line_count(overridden.out) == 8);
  CHECK(nlohmann::json::parse(overridden.err).at("config").at("r-max") == "10");

  std::ofstream(dir / "bad.json") << "{not json";
  CHECK(call({"--config", (dir / "bad.json").string(), "bound"}).code == 2);
}

TEST_CASE("simulate small chain") {
  const auto r = call({"simulate", "--family", "ising_lr", "--alpha", "3", "--n", "5", "--t-max", "4",
                       "--dt", "0.1", "--tol", "1e-3", "--r-list", "2..4"});
  REQUIRE(r.code == 0);
  CHECK(line_count(r.out) == 4);
  CHECK(r.out.rfind("model,alpha,n,r,delta,ts_empirical,ts_bound\n", 0) == 0);

  const auto dir = scratch();
  const auto curve = (dir / "curve.csv").string();
  const auto out = (dir / "sim.csv").string();
  REQUIRE(call({"--out", out, "simulate", "--alpha", "3", "--n", "4", "--t-max", "1", "--dt", "0.25",
                "--emit-curve", curve})
              .code == 0);
  CHECK(line_count(slurp(curve)) == 6);
  CHECK(slurp(curve).rfind("t,C(t),bound(t)\n", 0) == 0);
}

TEST_CASE("compare covers every family and exponent") {
  const auto r = call({"compare", "--alphas", "3,4", "--n", "4", "--t-max", "2", "--dt", "0.2", "--r-list", "2,3"});
  REQUIRE(r.code == 0);
  CHECK(line_count(r.out) == 1 + 2 * 2 * 2);
}
