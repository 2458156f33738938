#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " APX_CLI_PATH " " + args + " > cli_out.txt 2> cli_err.txt";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp("cli_out.txt");
  r.err = slurp("cli_err.txt");
  return r;
}

int lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("construct emits set files") {
  const auto r = run("construct --family staircase --m 4");
  CHECK(r.code == 0);
  CHECK(lines(r.out) == 10);
  CHECK(r.out.rfind("1\n2\n3\n4\n6\n", 0) == 0);
  CHECK(run("construct --family staircase --m 3").code == 2);
  CHECK(run("construct --family interval --m 0").code == 2);
  const auto j = nlohmann::json::parse(run("--format structured construct --family interval --m 2").out);
  CHECK(j["size"] == 5);
}

TEST_CASE("construct then count reproduces the closed forms") {
  for (long m = 2; m <= 20; m += 2) {
    write("stair.txt", run("construct --family staircase --m " + std::to_string(m)).out);
    const auto j = nlohmann::json::parse(run("--format structured count --a stair.txt --eq diff").out);
    CHECK(j["count"].get<long>() * 8 == 15 * m * m - 10 * m);
  }
  for (long m = 1; m <= 50; m += 7) {
    write("interval.txt", run("construct --family interval --m " + std::to_string(m)).out);
    const auto j = nlohmann::json::parse(run("--format structured count --a interval.txt --eq diff").out);
    CHECK(j["count"].get<long>() == (m + 1) * (m + 1) + m * m);
  }
}

TEST_CASE("count examples and exit codes") {
  write("stair2.txt", "1\n2\n4\n6\n8\n");
  write("empty.txt", "");
  write("sym1.txt", "-1\n0\n1\n");
  write("bad.txt", "1\n2\nthree\n");
  const auto j = nlohmann::json::parse(run("--format structured count --a stair2.txt --eq diff").out);
  CHECK(j["count"] == 5);
  for (const auto& b : j["bounds"]) {
    if (b["name"] == "principal") CHECK(b["value_num"] == "15");
    if (b["name"] == "antisymmetric") CHECK(b["value_num"] == "10");
  }
  const auto e = run("count --a empty.txt --eq diff");
  CHECK(e.code == 0);
  CHECK(e.out.find("count  0") != std::string::npos);
  const auto s = nlohmann::json::parse(run("--format structured count --a sym1.txt --eq diff").out);
  CHECK(s["count"] == 5);
  CHECK(s["bounds"][0]["name"] == "principal");
  CHECK(s["bounds"][0]["slack_num"] == "1");
  const auto bad = run("count --a bad.txt");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);
  CHECK(run("count --a missing.txt").code == 2);
  CHECK(run("count --a sym1.txt --eq lambda").code == 2);
  CHECK(run("count --a sym1.txt --eq lambda --lambda 3/2").code == 0);
  CHECK(run("count --a sym1.txt --c union --eq ap").code == 0);
  CHECK(run("count").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("search output is deterministic across worker counts") {
  const auto one = run("--format structured search --objective max-diff-antisym --n 3 --span 10 --jobs 1");
  const auto four = run("--format structured search --objective max-diff-antisym --n 3 --span 10 --jobs 4");
  CHECK(one.code == 0);
  CHECK(one.out == four.out);
  CHECK(nlohmann::json::parse(one.out)["best"] == 2);
  CHECK(one.err.find("stats:") != std::string::npos);
}

TEST_CASE("search checkpoint and resume through the command line") {
  std::remove("cli_ck.json");
  const std::string base = "search --objective max-diff --n 5 --span 8 --jobs 2";
  const auto straight = run(base);
  REQUIRE(straight.code == 0);
  auto partial = run(base + " --budget 3000 --checkpoint cli_ck.json");
  CHECK(partial.code == 4);
  int guard = 0;
  while (partial.code == 4 && guard++ < 500) partial = run(base + " --budget 3000 --checkpoint cli_ck.json --resume");
  CHECK(partial.code == 0);
  CHECK(partial.out == straight.out);
  write("cli_bad_ck.json", slurp("cli_ck.json").substr(0, 40));
  const auto corrupt = run(base + " --checkpoint cli_bad_ck.json --resume");
  CHECK(corrupt.code == 2);
  CHECK(corrupt.err.find("corrupt") != std::string::npos);
  CHECK(run(base, "AP_EXTREMAL_BUDGET=10").code == 4);
  CHECK(run(base, "AP_EXTREMAL_BUDGET=nope").code == 2);
}

TEST_CASE("config files supply defaults and flags win") {
  write("cli.toml", "[search]\nobjective = \"max-diff-antisym\"\nn = 3\nspan = 10\n");
  const auto from_file = run("--config cli.toml --format structured search");
  CHECK(from_file.code == 0);
  CHECK(nlohmann::json::parse(from_file.out)["best"] == 2);
  const auto overridden = run("--config cli.toml --format structured search --n 2");
  CHECK(nlohmann::json::parse(overridden.out)["n"] == 2);
}

TEST_CASE("verify targets") {
  const auto c1 = run("verify --target claim1 --tol 1/1000000000 --jobs 1 --certificate cli_c1.json");
  CHECK(c1.code == 0);
  const auto c4 = run("verify --target claim1 --tol 1/1000000000 --jobs 4 --certificate cli_c4.json");
  CHECK(c4.out == c1.out);
  CHECK(slurp("cli_c1.json") == slurp("cli_c4.json"));
  const auto replay = run("verify --replay cli_c1.json");
  CHECK(replay.code == 0);
  CHECK(replay.out.find("ok") != std::string::npos);
  write("cli_trunc.json", slurp("cli_c1.json").substr(0, 100));
  CHECK(run("verify --replay cli_trunc.json").code == 2);
  const auto fail = run("verify --target claim2-u --threshold -1/5 --budget 3000");
  CHECK(fail.code == 5);
  CHECK(fail.out.find("surviving") != std::string::npos);
  CHECK(run("verify --target critical-points").code == 0);
  CHECK(run("verify --target balancing --trials 2000").code == 0);
  CHECK(run("verify --target xy-lemma --trials 2000").code == 0);
  CHECK(run("verify --target decomposition --trials 500").code == 0);
  CHECK(run("verify --target compression-scan").code == 0);
  CHECK(run("verify --target main-scan --n-max 5 --span 8").code == 0);
  CHECK(run("verify --target recast-scan --size-cap 3 --span 6 --budget 10").code == 4);
  CHECK(run("verify --target claim1 --tol 0").code == 2);
  CHECK(run("verify --target nonsense").code == 2);
}
