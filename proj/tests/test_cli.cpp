#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "skm/bounds.hpp"
#include "skm/sequences.hpp"

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string base = "/tmp/skm_cli_case_" + std::to_string(counter++);
  std::string out_path = base + ".out";
  std::string err_path = base + ".err";
  std::string cmd = std::string("\"") + SKM_CLI_PATH + "\" " + args + " > " + out_path +
                    " 2> " + err_path;
  int rc = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

double second_field(const std::string& line) {
  auto pos = line.find(',');
  REQUIRE(pos != std::string::npos);
  return std::strtod(line.c_str() + pos + 1, nullptr);
}

}  // namespace

TEST_CASE("usage and domain errors exit with code 2") {
  CHECK(run_cli("").code == 2);                                   // no subcommand
  CHECK(run_cli("simulate --n 10").code == 2);                    // no schedule
  CHECK(run_cli("simulate --n 10 --a 0.8 --alpha 0.1").code == 2);  // both schedules
  CHECK(run_cli("simulate --n 10 --a 1.5").code == 2);            // exponent out of range
  CHECK(run_cli("bound --family power --n-list 10").code == 2);   // power needs --a
  CHECK(run_cli("bound --family warp --n-list 10").code == 2);    // unknown family

  CliResult suite = run_cli("verify --suite warp");
  CHECK(suite.code == 2);
  CHECK(suite.err.find("unknown") != std::string::npos);

  CliResult mdp = run_cli("qlearn --mdp /nonexistent/model.txt --a 1 --n 10");
  CHECK(mdp.code == 2);
  CHECK(mdp.err.find("cannot open") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("simulate --help").code == 0);
}

TEST_CASE("qlearn writes the csv to stdout when --out is omitted") {
  CliResult r = run_cli("qlearn --mdp duff --a 1 --n 200 --reps 2 --seed 3 --stride 100");
  CHECK(r.code == 0);
  std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);  // header + rows at n = 100, 200
  CHECK(lines[0].find("fq_mean") != std::string::npos);
  CHECK(lines[1].rfind("duff,1,100,2,", 0) == 0);
  CHECK(lines[2].rfind("duff,1,200,2,", 0) == 0);
}

TEST_CASE("horizon-tuned constant bound prints the closed-form value") {
  CliResult r =
      run_cli("bound --family constant --kappa 1 --mu 1 --sigma 1 --alpha auto "
              "--n-list 1000000");
  CHECK(r.code == 0);
  std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "n,bound");
  CHECK(lines[1].rfind("1000000,", 0) == 0);
  CHECK(second_field(lines[1]) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("printed power bounds agree with the library call") {
  CliResult r = run_cli("bound --family power --a 2/3 --kappa 2 --mu 1 --sigma 1 "
                        "--n-list 10,1000");
  CHECK(r.code == 0);
  std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  skm::StepsizeSchedule s = skm::StepsizeSchedule::power(2.0 / 3.0);
  skm::BoundParams p{2.0, 1.0, &s, skm::VarianceSchedule::bounded(1.0)};
  CHECK(second_field(lines[1]) == doctest::Approx(skm::bound_power(p, 10)).epsilon(1e-13));
  CHECK(second_field(lines[2]) == doctest::Approx(skm::bound_power(p, 1000)).epsilon(1e-13));
}

TEST_CASE("verification suite runs from the command line") {
  CliResult r = run_cli("verify --suite specfun --fast");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("simulate accepts the 2/3 token and writes the csv file") {
  std::string path = "/tmp/skm_cli_sim.csv";
  std::remove(path.c_str());
  CliResult r = run_cli("simulate --operator box --noise uniform:0.3 --a 2/3 --n 50 "
                        "--reps 2 --seed 1 --stride 25 --out " + path);
  CHECK(r.code == 0);
  std::vector<std::string> lines = lines_of(slurp(path));
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0].rfind("scenario,a_or_alpha,n,replications,", 0) == 0);
  CHECK(lines[1].rfind("box-affine,0.66666666666666663,25,2,", 0) == 0);
  std::remove(path.c_str());
}

TEST_CASE("a displacement constant adds the matching bound column") {
  CliResult r = run_cli("simulate --operator sgd-quadratic --noise rademacher:1 --a 0.8 "
                        "--n 40 --reps 2 --seed 1 --kappa 5 --stride 20");
  CHECK(r.code == 0);
  std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(!lines.empty());
  CHECK(lines[0].find(",bound_power,") != std::string::npos);

  CliResult c = run_cli("simulate --operator rotation --noise gaussian:1 --alpha 0.05 "
                        "--n 40 --reps 2 --seed 1 --kappa 2 --stride 20");
  CHECK(c.code == 0);
  CHECK(lines_of(c.out)[0].find(",bound_constant,") != std::string::npos);
}
