#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

using atmot::run_cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string src(const std::string& rel) { return std::string(ATMOT_SOURCE_DIR) + "/" + rel; }

}  // namespace

TEST_CASE("empty query list gives an empty bundle") {
  Run r = cli({"run", src("tests/data/empty.json"), "--json"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["reports"].empty());
}

TEST_CASE("the Z/2 example grid has nine verdicts") {
  Run r = cli({"run", src("problems/z2_m2.json"), "--json"});
  REQUIRE(r.code == 0);
  auto reports = nlohmann::json::parse(r.out)["reports"];
  REQUIRE(reports.size() == 9);
  for (const auto& q : reports) {
    std::string v = q["report"]["verdict"];
    CHECK((v == "ISO" || v == "MONO"));
    CHECK(q["report"].contains("method"));
    CHECK(q["report"]["value"].contains("certified"));
  }
}

TEST_CASE("exit codes") {
  CHECK(cli({"run", src("tests/data/malformed.json")}).code == 2);
  CHECK(cli({"run", src("tests/data/bad_character.json")}).code == 2);
  Run unknown = cli({"run", src("tests/data/unknown_object.json")});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("/queries/0/target") != std::string::npos);
  CHECK(cli({"run", src("tests/data/budget.json")}).code == 3);
  CHECK(cli({"run", src("tests/data/query_error.json")}).code == 1);
  CHECK(cli({"run", src("tests/data/does_not_exist.json")}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"theta-report", "--mode", "G"}).code == 2);
}

TEST_CASE("command line budget overrides the file") {
  CHECK(cli({"run", src("problems/s3_objects.json"), "--budget-mb", "0"}).code == 3);
}

TEST_CASE("reports are byte-identical across runs") {
  Run a = cli({"run", src("problems/s3_objects.json"), "--json"});
  Run b = cli({"run", src("problems/s3_objects.json"), "--json"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(cli({"run", src("problems/z4_tower.json")}).out == cli({"run", src("problems/z4_tower.json")}).out);
}

TEST_CASE("subcommands") {
  Run c = cli({"cohomology", "--group", "C4", "-m", "4", "--degree", "2", "--twist", "0", "--json"});
  CHECK(c.code == 0);
  CHECK(nlohmann::json::parse(c.out)["reports"][0]["report"]["value"]["factors"] == nlohmann::json{4});
  Run t = cli({"theta-report", "--group", "S3", "-m", "3", "--chi", "2,1", "--max-i", "1", "--max-j", "1"});
  CHECK(t.code == 0);
  CHECK(t.out.find("ISO") != std::string::npos);
  CHECK(cli({"ext", "--group", "C2", "--degree", "1"}).code == 0);
  CHECK(cli({"koszul-probe", "--group", "C2", "--degree", "2"}).out.find("CONJECTURE-FACING") != std::string::npos);
  CHECK(cli({"p-check", src("problems/complexes/z2_point.json")}).code == 0);
}

TEST_CASE("acceptance filter and negative control") {
  Run theta = cli({"accept", "--filter", "theta"});
  CHECK(theta.code == 0);
  for (const char* n : {"criterion 1:", "criterion 3:", "criterion 7:", "criterion 8:"})
    CHECK(theta.out.find(n) != std::string::npos);
  CHECK(theta.out.find("criterion 5:") == std::string::npos);
  Run bad = cli({"accept", "--filter", "oracle", "--corrupt-oracle", "--fail-fast"});
  CHECK(bad.code == 1);
  CHECK(bad.out.rfind("FAIL criterion 5", 0) == 0);
}
