#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef NONHOLO_CLI
#error "NONHOLO_CLI must name the CLI binary"
#endif

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is discarded.
Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(NONHOLO_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

double drift(const std::vector<std::vector<std::string>>& rows, std::size_t col) {
  const double first = std::stod(rows[1][col]);
  double d = 0.0;
  for (std::size_t k = 1; k < rows.size(); ++k) d = std::max(d, std::abs(std::stod(rows[k][col]) - first));
  return d;
}

}  // namespace

TEST_CASE("unknown names and invalid configs exit 2") {
  CHECK(run("verify nosuch").status == 2);
  CHECK(run("verify particle --suites bogus").status == 2);
  CHECK(run("verify particle --samples 0").status == 2);
  CHECK(run("verify particle --tol -1").status == 2);
  CHECK(run("verify particle --derivative-mode symbolic").status == 2);
  CHECK(run("verify particle --param nosuch=1").status == 2);
  CHECK(run("verify snakeboard --param J=5").status == 2);
  CHECK(run("verify --no-such-flag").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("simulate particle --x0 1,2").status == 2);
  CHECK(run("simulate particle --dt 0").status == 2);
  CHECK(run("simulate nosuch").status == 2);
}

TEST_CASE("list prints every example with its suites") {
  const Run r = run("list");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("particle: jacobiator jk lambda psi casimir dynamics twisted\n") != std::string::npos);
  CHECK(r.out.find("particle_chaplygin:") != std::string::npos);
  CHECK(r.out.find("bates_sniatycki") != std::string::npos);
  CHECK(r.out.find("ball_rank3:") != std::string::npos);
}

TEST_CASE("verify report for the particle") {
  const Run r = run("verify particle --suites jacobiator,lambda");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == "nonholo-report/1");
  CHECK(j["pass"] == true);
  CHECK(j["config"]["samples"] == 200);
  CHECK(j["config"]["seed"] == 42);
  REQUIRE(j["examples"].size() == 1);
  const auto& suites = j["examples"][0]["suites"];
  REQUIRE(suites.size() == 2);
  CHECK(suites[0]["name"] == "jacobiator");
  CHECK(suites[1]["name"] == "lambda");
  for (const auto& s : suites) {
    CHECK(s["max_residual"].get<double>() <= 1e-7);
    CHECK(s["tolerance"] == 1e-7);
    CHECK(s["samples"] == 200);
    CHECK(s["worst_point"].size() > 0);
  }
}

TEST_CASE("free ball Jacobiator vanishes") {
  const Run r = run("verify ball_rank0 --suites jacobiator");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["examples"][0]["suites"][0]["max_residual"].get<double>() <= 1e-8);
}

TEST_CASE("failing suites exit 1 with residuals reported") {
  const Run r = run("verify particle --suites jacobiator --tol 1e-30");
  CHECK(r.status == 1);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["pass"] == false);
  CHECK(j["examples"][0]["suites"][0]["pass"] == false);
}

TEST_CASE("reports are byte-stable and follow the seed") {
  const std::string args = "verify particle disk --suites jacobiator,psi --samples 40";
  const Run a = run(args + " --jobs 1"), b = run(args + " --jobs 4");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  const Run env = run(args, "NONHOLO_SEED=7");
  CHECK(nlohmann::json::parse(env.out)["config"]["seed"] == 7);
  CHECK(env.out != a.out);
  // An explicit flag wins over the environment.
  CHECK(run(args + " --seed 42", "NONHOLO_SEED=7").out == a.out);
  CHECK(run(args, "NONHOLO_SEED=x").status == 2);
}

TEST_CASE("--out writes the report to a file") {
  const std::string path = "cli_test_report.json";
  std::remove(path.c_str());
  const Run r = run("verify disk --suites jk --samples 10 --out " + path);
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(nlohmann::json::parse(ss.str())["pass"] == true);
  std::remove(path.c_str());
}

TEST_CASE("finite-difference mode is recorded and still passes loosely") {
  const Run r = run("verify disk --suites jacobiator --samples 20 --derivative-mode fd --fd-step 1e-5 --tol 1e-4");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["config"]["derivative_mode"] == "fd");
  CHECK(j["config"]["fd_step"] == 1e-5);
}

TEST_CASE("simulate the disk conserves p̃_φ") {
  const Run r = run("simulate disk --t-end 10 --dt 1e-3");
  REQUIRE(r.status == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 10002);
  CHECK(rows[0][0] == "t");
  CHECK(drift(rows, column(rows[0], "pt_phi")) <= 1e-8);
}

TEST_CASE("simulate the particle from x0 = (0,1,0,2,1)") {
  const Run r = run("simulate particle --x0 0,1,0,2,1 --t-end 10 --dt 1e-3");
  REQUIRE(r.status == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 10002);
  CHECK(rows[1][4] == "2");
  CHECK(drift(rows, column(rows[0], "H_M")) <= 1e-8);
  CHECK(r.out == run("simulate particle --x0 0,1,0,2,1 --t-end 10 --dt 1e-3").out);
}
