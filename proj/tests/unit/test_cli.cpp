#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace sparsereg;
using sparsereg::testing::orthonormal_design;
using sparsereg::testing::temp_path;

namespace {

struct RunResult {
  int status = 0;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(SPARSEREG_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Orthonormal two-feature problem with cross moment z = (3, 1).
void write_orthonormal(const std::string& x_path, const std::string& y_path) {
  RandomStream rng(1);
  const Matrix x = orthonormal_design(rng, 6, 2);
  Vector z(2);
  z << 3.0, 1.0;
  write_matrix_csv(x_path, x);
  write_vector_csv(y_path, x * z);
}

}  // namespace

TEST(Cli, FitMatchesSoftThreshold) {
  const auto x = temp_path("cli_x.csv"), y = temp_path("cli_y.csv"), out = temp_path("cli_beta.csv");
  write_orthonormal(x, y);
  const auto r = run("fit --design " + x + " --response " + y + " --lambda 1 --out " + out);
  ASSERT_EQ(r.status, 0) << r.output;
  const auto text = slurp(out);
  EXPECT_NE(text.find("# converged=true"), std::string::npos);
  EXPECT_NE(text.find("1,2.5\n"), std::string::npos) << text;
  EXPECT_NE(text.find("2,0.5\n"), std::string::npos) << text;
}

TEST(Cli, TwoStageUnpenalizesSelected) {
  const auto x = temp_path("cli_x2.csv"), y = temp_path("cli_y2.csv");
  write_orthonormal(x, y);
  const auto r = run("two-stage --design " + x + " --response " + y + " --lambda 1 --q 1");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("# selected=1\n"), std::string::npos);
  EXPECT_NE(r.output.find("1,3\n"), std::string::npos) << r.output;
}

TEST(Cli, DiagnoseAndBoundsPipeline) {
  const auto g = temp_path("cli_gram.csv"), q = temp_path("cli_q.csv"), params = temp_path("cli_params.txt");
  write_matrix_csv(g, Matrix::Identity(10, 10));
  auto r = run("diagnose --gram " + g + " --k 5 --ell 3 --p 2 --out " + q);
  ASSERT_EQ(r.status, 0) << r.output;
  const auto table = slurp(q);
  EXPECT_NE(table.find("k,ell,p,quantity,value,exactness"), std::string::npos);
  EXPECT_NE(table.find("5,3,2,pi,0,upper_bound"), std::string::npos) << table;

  std::ofstream(params) << "n = 100\nd = 10\nk = 2\nell = 3\nlambda = 0.2\nsigma = 0\n";
  r = run("bounds --params " + params + " --quantities " + q + " --bound corollary61");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("corollary61,rhs,true," + format_number(8.0 * std::sqrt(2.0) * 0.2)), std::string::npos)
      << r.output;
}

TEST(Cli, GreedyTrace) {
  const auto x = temp_path("cli_gx.csv"), ey = temp_path("cli_gey.csv"), bb = temp_path("cli_gbb.csv");
  write_matrix_csv(x, Matrix::Ones(1, 1));
  write_vector_csv(ey, Vector::Constant(1, 2.0));
  write_vector_csv(bb, Vector::Zero(1));
  const auto r = run("greedy --design " + x + " --mean-response " + ey + " --beta-bar " + bb + " --k 1");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("1,1,2,0,0"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("# bound_holds=true"), std::string::npos);
}

TEST(Cli, SimulateIsByteIdentical) {
  const auto a = temp_path("cli_sim_a.csv"), b = temp_path("cli_sim_b.csv");
  const std::string args = "simulate --n 15 --d 20 --k 3 --trials 3 --lambda-grid 0.1,0.5 --q-grid 0-2 --seed 4 --out ";
  ASSERT_EQ(run(args + a).status, 0);
  ASSERT_EQ(run(args + b).status, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto text = slurp(a);
  EXPECT_EQ(text.substr(0, text.find('\n')), "lambda,q,metric,mean,stderr,trials,failed");
}

TEST(Cli, ErrorsAreJson) {
  auto r = run("fit --design /nonexistent.csv --response /nonexistent.csv --lambda 1");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("{\"error\":\"IoError\""), std::string::npos) << r.output;
  r = run("fit --lambda 1");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("\"error\""), std::string::npos);
  r = run("diagnose --gram /nonexistent.csv --k 1 --ell 1 --p 3");
  EXPECT_NE(r.status, 0);
}
