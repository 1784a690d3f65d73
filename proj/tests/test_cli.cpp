#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string output;
};

fs::path scratch_dir() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("wlign-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path log = scratch_dir() / ("out" + std::to_string(counter++) + ".txt");
  std::string cmd = std::string(WLIGN_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  CliResult r;
  if (status != -1 && WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string emit_pair(const std::string& name) {
  fs::path dir = scratch_dir() / name;
  auto r = run_cli("corpus emit " + name + " --out-dir " + dir.string());
  REQUIRE(r.exit_code == 0);
  REQUIRE(fs::exists(dir / "g.json"));
  REQUIRE(fs::exists(dir / "h.json"));
  return dir.string();
}

}  // namespace

TEST_CASE("corpus subcommand lists and materializes the bundled pairs") {
  auto r = run_cli("corpus list");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.output);
  REQUIRE(doc["pairs"].size() == 5);
  emit_pair("cycle6_vs_two_triangles");
}

TEST_CASE("refinement subcommands report stabilization and equivalence") {
  auto dir = emit_pair("cycle6_vs_two_triangles");
  auto r = run_cli("wl run --graph " + dir + "/g.json -k 2 --rounds 3");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.output);
  CHECK(doc["k"] == 2);
  CHECK(doc["n"] == 6);

  auto d = run_cli("wl distinguish --g " + dir + "/g.json --h " + dir + "/h.json -k 2");
  REQUIRE(d.exit_code == 0);
  auto ddoc = nlohmann::json::parse(d.output);
  CHECK(ddoc["equivalent_at"].is_array());

  auto dir2 = emit_pair("path4_vs_star");
  auto s = run_cli("wl distinguish --g " + dir2 + "/g.json --h " + dir2 + "/h.json -k 2");
  REQUIRE(s.exit_code == 0);
  auto sdoc = nlohmann::json::parse(s.output);
  CHECK(sdoc["equivalent_at"].back() == false);
}

TEST_CASE("model sampling, evaluation and comparison round trip through files") {
  auto dir = emit_pair("cycle6_vs_two_triangles");
  fs::path model = scratch_dir() / "model.json";
  auto s = run_cli("--seed 11 --out " + model.string() + " ign sample -k 2 --graph " + dir +
                   "/g.json --depth 2 --channels 3");
  REQUIRE(s.exit_code == 0);
  REQUIRE(fs::exists(model));

  auto r = run_cli("ign run --model " + model.string() + " --graph " + dir + "/g.json");
  REQUIRE(r.exit_code == 0);
  auto rdoc = nlohmann::json::parse(r.output);
  REQUIRE(rdoc["output"].is_array());

  auto d = run_cli("ign distinguish --model " + model.string() + " --g " + dir +
                   "/g.json --h " + dir + "/h.json");
  REQUIRE(d.exit_code == 0);
  auto ddoc = nlohmann::json::parse(d.output);
  CHECK(ddoc["outputs_equal"] == true);
  CHECK(ddoc["output_g"] == ddoc["output_h"]);
}

TEST_CASE("formula evaluation reads assignments and rejects missing ones") {
  auto dir = emit_pair("path4_vs_star");
  fs::path formula = scratch_dir() / "edge.sexp";
  std::ofstream(formula) << "(edge x1 x2)";
  auto ok = run_cli("logic eval --graph " + dir + "/g.json --formula " + formula.string() +
                    " --assign x1=0,x2=1");
  REQUIRE(ok.exit_code == 0);
  auto doc = nlohmann::json::parse(ok.output);
  CHECK(doc["value"].is_boolean());

  auto missing = run_cli("logic eval --graph " + dir + "/g.json --formula " + formula.string() +
                         " --assign x1=0");
  CHECK(missing.exit_code == 74);

  auto agree = run_cli("logic agree --g " + dir + "/g.json --h " + dir +
                       "/h.json -k 2 --qr 3 --samples 40");
  REQUIRE(agree.exit_code == 0);
  auto adoc = nlohmann::json::parse(agree.output);
  CHECK(adoc["samples"] == 40);
  CHECK(adoc["disagreements"].is_number());
}

TEST_CASE("usage and data errors map to distinct exit codes") {
  CHECK(run_cli("wl run --graph /nonexistent.json -k 2").exit_code == 74);
  CHECK(run_cli("corpus emit not_a_pair --out-dir " + scratch_dir().string()).exit_code == 74);
  CHECK(run_cli("wl run --no-such-flag").exit_code == 64);
  CHECK(run_cli("--mode bogus corpus list").exit_code == 64);
  auto dir = emit_pair("rook4x4_vs_shrikhande");
  CHECK(run_cli("--mode float certify run --suite theorem --g " + dir + "/g.json --h " + dir +
                "/h.json -k 2 --models 1")
            .exit_code == 64);
  CHECK(run_cli("patterns enum --arity 0").exit_code == 64);
}

TEST_CASE("certification exits reflect the aggregated status") {
  auto dir = emit_pair("path4_vs_star");
  // distinguishable pair: the conditional checks all skip
  auto skip = run_cli("certify run --suite theorem --g " + dir + "/g.json --h " + dir +
                      "/h.json -k 2 --models 2");
  CHECK(skip.exit_code == 2);
  auto sdoc = nlohmann::json::parse(skip.output);
  CHECK(sdoc["status"] == "SKIP");

  auto dir2 = emit_pair("cycle6_vs_two_triangles");
  std::string base = "certify run --suite key-lemma --g " + dir2 + "/g.json --h " + dir2 +
                     "/h.json -k 2";
  auto a = run_cli(base);
  REQUIRE(a.exit_code == 0);
  auto adoc = nlohmann::json::parse(a.output);
  CHECK(adoc["status"] == "PASS");
  for (const auto& rep : adoc["reports"]) CHECK(rep["status"] == "PASS");

  auto b = run_cli(base);
  CHECK(a.output == b.output);  // reports are byte-reproducible
}

TEST_CASE("pattern enumeration annotates diagonal structure") {
  auto r = run_cli("patterns enum --arity 4 -k 2");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.output);
  CHECK(doc["count"] == 15);
  REQUIRE(doc["patterns"].size() == 15);
  CHECK(doc["patterns"][0].contains("classes"));
}
