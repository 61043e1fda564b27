#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(POOLGAME_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("converge subcommand") {
  auto res = run_cli("converge --powers 0.2,0.2 --x \"0,0.05;0,0\"");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("pool,power,R,r,residual") == 0);
  CHECK(res.out.find("0.842105") != std::string::npos);
  CHECK(res.out.find("solo,0.6") != std::string::npos);

  SUBCASE("iterate method agrees") {
    auto it = run_cli("converge --powers 0.2,0.2 --x \"0,0.05;0,0\" --method iterate");
    CHECK(it.exit_code == 0);
    CHECK(it.out.find("0.842105") != std::string::npos);
  }
}

TEST_CASE("validation failures exit with code 2") {
  CHECK(run_cli("converge --powers 0.6,0.6").exit_code == 2);
  CHECK(run_cli("converge --powers 0.2,0.3 --x \"0,0.25;0,0\"").exit_code == 2);
  CHECK(run_cli("converge").exit_code == 2);           // missing required flag
  CHECK(run_cli("no-such-command").exit_code == 2);
}

TEST_CASE("best-response subcommand") {
  auto res = run_cli("best-response --powers 0.2,0.3 --actor 1");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("actor,target,x,r_actor") == 0);
  CHECK(res.out.find("1,2,0.036") != std::string::npos);
  CHECK(res.out.find("1.0173") != std::string::npos);
}

TEST_CASE("equilibrium subcommand") {
  auto res = run_cli("equilibrium --powers 0.2,0.2");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("1,2,0.022") != std::string::npos);
  CHECK(res.out.find("0.928333") != std::string::npos);
  CHECK(res.out.find("converged,true") != std::string::npos);

  SUBCASE("non-convergence exits 3") {
    auto starved = run_cli("equilibrium --powers 0.2,0.2 --max-cycles 1 --x-tol 1e-15");
    CHECK(starved.exit_code == 3);
    CHECK(starved.out.find("converged,false") != std::string::npos);
  }
}

TEST_CASE("symmetric subcommand") {
  auto res = run_cli("symmetric --p 2 --mi 0.2");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("p,mi,x,r") == 0);
  CHECK(res.out.find("2,0.2,0.022") != std::string::npos);
  CHECK(res.out.find("0.928333") != std::string::npos);
  CHECK(run_cli("symmetric --p 3 --mi 0.4").exit_code == 2);
}

TEST_CASE("dilemma subcommand") {
  auto res = run_cli("dilemma --m1 0.2 --m2 0.2");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("attack_dominant_pool1,true") != std::string::npos);
  CHECK(res.out.find("attack_dominant_pool2,true") != std::string::npos);
  CHECK(res.out.find("mutual_attack_pareto_dominated,true") != std::string::npos);
  CHECK(res.out.find("0.9283") != std::string::npos);
}

TEST_CASE("sweep subcommand writes the pinned CSV schema") {
  auto res = run_cli("sweep --m1 0.2:0.4:0.1 --m2 0.5:0.9:0.2 --threads 2");
  CHECK(res.exit_code == 0);
  std::stringstream ss(res.out);
  std::string line;
  REQUIRE(std::getline(ss, line));
  CHECK(line == "m1,m2,feasible,x12,x21,r1,r2,converged");
  std::size_t rows = 0, infeasible = 0;
  while (std::getline(ss, line)) {
    ++rows;
    if (line.find(",false,,,,,") != std::string::npos) ++infeasible;
  }
  CHECK(rows == 9);
  CHECK(infeasible == 4);  // every cell with m1 + m2 > 1
}

TEST_CASE("simulate subcommand with config file and flag overrides") {
  std::string cfg = "cli_sim_cfg.txt";
  {
    std::ofstream f(cfg, std::ios::binary);
    f << "# tiny smoke run\n"
      << "powers=0.2,0.2\n"
      << "x=0,0.05;0,0\n"
      << "miners=200\n"
      << "steps=2000\n"
      << "seed=5\n";
  }
  auto res = run_cli("simulate --config " + cfg);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("group,members,empirical,analytic,se,z") == 0);
  CHECK(res.out.find("pool1,40,") != std::string::npos);
  CHECK(res.out.find("pool2,40,") != std::string::npos);

  SUBCASE("flags override the file") {
    auto bigger = run_cli("simulate --config " + cfg + " --miners 400 --steps 1000");
    CHECK(bigger.exit_code == 0);
    CHECK(bigger.out.find("pool1,80,") != std::string::npos);
  }
  SUBCASE("seed is required") {
    CHECK(run_cli("simulate --powers 0.2 --steps 100").exit_code == 2);
  }
  std::remove(cfg.c_str());
}

TEST_CASE("outputs are byte-identical across repeat runs") {
  const char* a = "cli_det_a.csv";
  const char* b = "cli_det_b.csv";
  std::string args = "simulate --powers 0.2,0.2 --x \"0,0.02;0.01,0\" --miners 200 "
                     "--steps 2000 --seed 77 --out ";
  CHECK(run_cli(args + a).exit_code == 0);
  CHECK(run_cli(args + b).exit_code == 0);
  std::string ca = slurp(a), cb = slurp(b);
  CHECK(!ca.empty());
  CHECK(ca == cb);
  std::remove(a);
  std::remove(b);

  SUBCASE("analytic path too") {
    std::string eq = "equilibrium --powers 0.15,0.35 --out ";
    CHECK(run_cli(eq + a).exit_code == 0);
    CHECK(run_cli(eq + b).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    std::remove(a);
    std::remove(b);
  }
}
