#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#ifndef STRATINF_CLI_PATH
#error "STRATINF_CLI_PATH must name the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(STRATINF_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (const std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "stratinf_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("generate writes a reproducible edge list") {
  const auto dir = scratch_dir();
  const auto a = dir / "g10a.txt";
  const auto b = dir / "g10b.txt";
  REQUIRE(run("generate --nodes 10 --density 2 --seed 7 -o " + q(a)).code == 0);
  REQUIRE(run("generate --nodes 10 --density 2 --seed 7 -o " + q(b)).code == 0);
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  std::istringstream lines(text);
  int edges = 0;
  int comments = 0;
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind('#', 0) == 0) {
      ++comments;
      CHECK(line.find("seed=7") != std::string::npos);
    } else {
      ++edges;
    }
  }
  CHECK(comments == 1);
  CHECK(edges == 20);
  CHECK(run("generate --nodes 3 --density 5").code == 2);
}

TEST_CASE("exact prints ten significant digits") {
  const auto dir = scratch_dir();
  const auto one = dir / "one.txt";
  std::ofstream(one) << "s v 0.7\n";
  CHECK(run("exact -i " + q(one) + " -s s").out == "0.7000000000\n");
  CHECK(run("exact -i " + q(one) + " -s s --method brute").out == "0.7000000000\n");

  const auto ten = dir / "g5.txt";
  REQUIRE(run("generate --nodes 5 --density 2 --seed 3 -o " + q(ten)).code == 0);
  const auto brute = run("exact -i " + q(ten) + " -s 0 --method brute");
  const auto dc = run("exact -i " + q(ten) + " -s 0 --method dc --r 3");
  CHECK(brute.code == 0);
  CHECK(brute.out == dc.out);

  const auto big = dir / "g30.txt";
  REQUIRE(run("generate --nodes 10 --density 3 --seed 1 -o " + q(big)).code == 0);
  CHECK(run("exact -i " + q(big) + " -s 0 --method brute").code == 2);
  CHECK(run("exact -i " + q(one) + " -s nobody").code == 2);
}

TEST_CASE("weight input and seed sets") {
  const auto dir = scratch_dir();
  const auto w = dir / "weights.txt";
  std::ofstream(w) << "a b 2\n";
  CHECK(run("exact -i " + q(w) + " --value-kind weight -s a").out == "0.6321205588\n");
  const auto p = dir / "bad_prob.txt";
  std::ofstream(p) << "a b 1.5\n";
  CHECK(run("exact -i " + q(p) + " -s a").code == 2);
  const auto m = dir / "malformed.txt";
  std::ofstream(m) << "a b 0.5\na b\n";
  CHECK(run("exact -i " + q(m) + " -s a").code == 2);
  CHECK(run("exact -i " + q(dir / "missing.txt") + " -s a").code == 1);

  // Seeds {a, c} on a -> b (1.0), c isolated: both seeds plus b.
  const auto set = dir / "set.txt";
  std::ofstream(set) << "a b 1.0\nc b 0.0\n";
  CHECK(run("exact -i " + q(set) + " -s a -s c").out == "3.000000000\n");
}

TEST_CASE("estimate is deterministic and validates flags") {
  const auto dir = scratch_dir();
  const auto g = dir / "g40.txt";
  REQUIRE(run("generate --nodes 40 --density 3 --seed 2 -o " + q(g)).code == 0);
  auto value_line = [](const std::string& out) { return out.substr(0, out.find('\n')); };
  const auto a = run("estimate -i " + q(g) + " -s 0 -e nmc -N 1000 --seed 1");
  const auto b = run("estimate -i " + q(g) + " -s 0 -e nmc -N 1000 --seed 1");
  CHECK(a.code == 0);
  CHECK(value_line(a.out) == value_line(b.out));
  CHECK(a.out.find("samples 1000") != std::string::npos);
  CHECK(run("estimate -i " + q(g) + " -s 0 -e rss1 --strategy bfs --r 5 --tau 10").code == 0);
  CHECK(run("estimate -i " + q(g) + " -s 0 -e rss2 --strategy random --lazy").code == 0);
  CHECK(run("estimate -i " + q(g) + " -s 0 -e bss1 --r 21").code == 2);
  CHECK(run("estimate -i " + q(g) + " -s 0 -e magic").code == 2);
  CHECK(run("estimate -i " + q(g) + " -s 0 --strategy dfs").code == 2);
  CHECK(run("estimate --nodes 20 --density 2 -s 0 -e bss2").code == 0);
  CHECK(run("estimate -s 0").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("evaluate writes identical reports for the same seed") {
  const auto dir = scratch_dir();
  const auto g = dir / "g60.txt";
  REQUIRE(run("generate --nodes 60 --density 3 --seed 4 -o " + q(g)).code == 0);
  const std::string common = "evaluate -i " + q(g) +
                             " --trials 2 --seed-nodes 3 -N 100 --r2 8 --seed 11";
  const auto csv1 = dir / "r1.csv";
  const auto csv2 = dir / "r2.csv";
  const auto js1 = dir / "r1.json";
  const auto js2 = dir / "r2.json";
  REQUIRE(run(common + " --csv " + q(csv1) + " --json " + q(js1)).code == 0);
  REQUIRE(run(common + " --threads 3 --csv " + q(csv2) + " --json " + q(js2)).code == 0);
  CHECK(slurp(csv1) == slurp(csv2));
  CHECK(slurp(js1) == slurp(js2));

  // Default roster: ten estimators.
  std::istringstream lines(slurp(csv1));
  std::string header;
  std::getline(lines, header);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 10);
  const auto doc = nlohmann::json::parse(slurp(js1));
  CHECK(doc["rows"][1]["estimator"] == "rss1-rm:1");
  CHECK(doc["rows"][1]["r"] == 1);
  CHECK(doc["rows"][9]["r"] == 8);
  CHECK(doc["baseline_added"] == false);

  const auto partial = run(common + " --estimators bss1-bfs,rss2-rm:4");
  CHECK(partial.code == 0);
  CHECK(partial.out.rfind("estimator,", 0) == 0);
  CHECK(partial.out.find("\nnmc,") != std::string::npos);
  CHECK(run(common + " --estimators bss1-xyz").code == 2);
  CHECK(run(common + " --estimators bss1:30").code == 2);
}
