// Black-box checks of the circloop binary: exit-status contract, golden
// determinism of plan/gen output, and the report pipeline.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "fixtures.hpp"

using namespace circloop;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  RunResult res;
  const std::string cmd = std::string(CIRCLOOP_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
  int rc = pclose(pipe);
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

std::string data_path(const std::string& name) {
  return std::string(CIRCLOOP_DATA_DIR) + "/" + name;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/circloop_test_" + name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string mask_wall_time(std::string text) {
  auto doc = ordered_json::parse(text);
  doc.erase("wall_time_ms");
  return doc.dump(2);
}

}  // namespace

TEST_CASE("validate exit statuses: 0 valid, 1 findings, 2 malformed") {
  CHECK(run("validate " + data_path("gears.json")).status == 0);
  CHECK(run("validate " + data_path("gears.json")).out.empty());

  std::string level_break = testing::kGearsJson;
  size_t pos = level_break.find("\"level\": 1");
  level_break.replace(pos, 10, "\"level\": 0");  // G claims level 0 with a product input
  RunResult findings = run("validate " + temp_file("level.json", level_break));
  CHECK(findings.status == 1);
  CHECK(findings.out.find("G") != std::string::npos);
  CHECK(std::count(findings.out.begin(), findings.out.end(), '\n') >= 1);

  RunResult truncated = run("validate " + temp_file("trunc.json", "{\"schema_version\": \"circ"));
  CHECK(truncated.status == 2);
  CHECK(run("validate /tmp/does_not_exist_circloop.json").status == 2);
}

TEST_CASE("plan emits the fixture optimum and is byte-stable") {
  const std::string out1 = "/tmp/circloop_test_res1.json";
  const std::string out2 = "/tmp/circloop_test_res2.json";
  CHECK(run("plan " + data_path("gears.json") + " " + data_path("plan_exhaustive.json") +
            " -o " + out1).status == 0);
  CHECK(run("plan " + data_path("gears.json") + " " + data_path("plan_exhaustive.json") +
            " -o " + out2).status == 0);

  auto doc = ordered_json::parse(slurp(out1));
  CHECK(doc["score"] == 21.0);
  CHECK(doc["feasible"] == true);
  CHECK(doc["moves"].size() == 1);
  CHECK(doc["nodes"] == 4);

  CHECK(mask_wall_time(slurp(out1)) == mask_wall_time(slurp(out2)));
}

TEST_CASE("mcts plan matches the exhaustive score on the fixture") {
  const std::string out = "/tmp/circloop_test_res_mcts.json";
  CHECK(run("plan " + data_path("gears.json") + " " + data_path("plan_mcts.json") + " -o " +
            out).status == 0);
  auto doc = ordered_json::parse(slurp(out));
  CHECK(doc["score"] == 21.0);
  CHECK(doc["seed"] == 42);
  CHECK(doc["algorithm"] == "mcts");
}

TEST_CASE("every algorithm produces byte-stable golden output on the fixture") {
  for (const std::string plan : {"plan_exhaustive", "plan_greedy", "plan_beam", "plan_mcts"}) {
    const std::string out1 = "/tmp/circloop_test_golden1.json";
    const std::string out2 = "/tmp/circloop_test_golden2.json";
    REQUIRE(run("plan " + data_path("gears.json") + " " + data_path(plan + ".json") + " -o " +
                out1).status == 0);
    REQUIRE(run("plan " + data_path("gears.json") + " " + data_path(plan + ".json") + " -o " +
                out2).status == 0);
    INFO(plan);
    CHECK(mask_wall_time(slurp(out1)) == mask_wall_time(slurp(out2)));
    CHECK(ordered_json::parse(slurp(out1))["score"] == 21.0);
  }
}

TEST_CASE("plan with --audit and --workers still reproduces the optimum") {
  const std::string out = "/tmp/circloop_test_res_audit.json";
  CHECK(run("plan " + data_path("gears.json") + " " + data_path("plan_mcts.json") +
            " --audit --workers 2 -o " + out).status == 0);
  CHECK(ordered_json::parse(slurp(out))["score"] == 21.0);
}

TEST_CASE("plan rejects unknown algorithms and oversized caps") {
  std::string bad_algo = temp_file("plan_bad.json", R"({
    "demand": [{"product": "B", "units": 1.0}], "algorithm": "anneal"})");
  RunResult res = run("plan " + data_path("gears.json") + " " + bad_algo);
  CHECK(res.status == 1);
  CHECK(res.out.find("unknown algorithm") != std::string::npos);

  std::string tiny_cap = temp_file("plan_cap.json", R"({
    "demand": [{"product": "B", "units": 1.0}], "algorithm": "exhaustive",
    "params": {"cap": 2}})");
  RunResult capped = run("plan " + data_path("gears.json") + " " + tiny_cap);
  CHECK(capped.status == 1);
  CHECK(capped.out.find("state space exceeds cap") != std::string::npos);

  CHECK(run("plan " + data_path("gears.json") + " " +
            temp_file("plan_trunc.json", "{\"demand\"")).status == 2);
}

TEST_CASE("gen is deterministic and its output validates") {
  const std::string a = "/tmp/circloop_test_gen_a.json";
  const std::string b = "/tmp/circloop_test_gen_b.json";
  const std::string flags = "gen --seed 1 --materials 4 --levels 2 --per-level 3 --class-size 2";
  CHECK(run(flags + " -o " + a).status == 0);
  CHECK(run(flags + " -o " + b).status == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(run("validate " + a).status == 0);

  CHECK(run("gen --seed 2 --materials 4 --levels 2 --per-level 3 --class-size 2 -o " + b)
            .status == 0);
  CHECK(slurp(a) != slurp(b));
}

TEST_CASE("report renders tables and refuses mismatched inputs") {
  const std::string res = "/tmp/circloop_test_res_report.json";
  REQUIRE(run("plan " + data_path("gears.json") + " " + data_path("plan_exhaustive.json") +
              " -o " + res).status == 0);
  RunResult report = run("report " + data_path("gears.json") + " " + res);
  CHECK(report.status == 0);
  CHECK(report.out.find("B,5,11,0,2,3") != std::string::npos);
  CHECK(report.out.find("indicator,value,cap,excess") != std::string::npos);

  // a different economy file must be rejected by the hash check
  std::string other = testing::kGearsJson;
  other.replace(other.find("2.0"), 3, "2.5");
  RunResult mismatch = run("report " + temp_file("other_eco.json", other) + " " + res);
  CHECK(mismatch.status == 1);
  CHECK(mismatch.out.find("mismatched economy/result") != std::string::npos);
}
