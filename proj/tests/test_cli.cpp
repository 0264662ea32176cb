#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spectra/problem.hpp"

using namespace spectra;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

// Runs the tool with stderr discarded; args are passed through the shell.
RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" SPECTRA_EXE "\" " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string sample(const std::string& name) { return std::string("\"") + SPECTRA_SAMPLES "/" + name + "\""; }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string c; std::getline(in, c, ',');) out.push_back(c);
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("spectra_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run("--help").code, 0);
  const RunResult v = run("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(kToolVersion), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("eig --interval 0 1").code, 2);
  EXPECT_EQ(run("eig --problem " + sample("two_plus_one.json") + " --interval 1 0").code, 2);
  EXPECT_EQ(run("eig --problem " + sample("two_plus_one.json") + " --interval 0 1 --format xml").code, 2);
  EXPECT_EQ(run("eig --problem /nonexistent.json --interval 0 1").code, 2);
  EXPECT_EQ(run("eig --problem " + sample("two_plus_one.json") + " --interval 0 1 --tol-abs -1").code, 2);
  EXPECT_EQ(run("verify bogus").code, 2);
}

TEST(Cli, DomainErrorExitsThree) {
  // -3 and 0 lie on opposite sides of the lower-right eigenvalue -2.
  EXPECT_EQ(run("eig --problem " + sample("two_plus_one.json") + " --interval -3 0").code, 3);
  EXPECT_EQ(run("gap --problem " + sample("two_plus_one.json") + " --lambda -2").code, 3);
}

TEST(Cli, EigHandExample) {
  const RunResult r = run("eig --problem " + sample("two_plus_one.json") + " --interval -1.9 2.9");
  ASSERT_EQ(r.code, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "lambda,multiplicity,bracket_lo,bracket_hi,neg_type_max");
  // The blocks decouple into 2x2 pencils with eigenvalues (sqrt 13 - 1) / 2
  // and (7 - sqrt 5) / 2 in this gap.
  EXPECT_NEAR(std::stod(split(l[1])[0]), (std::sqrt(13.0) - 1.0) / 2.0, 1e-9);
  EXPECT_NEAR(std::stod(split(l[2])[0]), (7.0 - std::sqrt(5.0)) / 2.0, 1e-9);
}

TEST(Cli, EmptyIntervalWritesHeaderOnly) {
  const RunResult r = run("eig --problem " + sample("two_plus_one.json") + " --interval -1.5 -1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "lambda,multiplicity,bracket_lo,bracket_hi,neg_type_max\n");
}

TEST(Cli, EigJsonEchoesConfigAndProblem) {
  const RunResult r =
      run("eig --problem " + sample("two_plus_one.json") + " --interval -1.9 2.9 --format json --tol-abs 1e-11");
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("command"), "eig");
  EXPECT_EQ(j.at("config").at("lambda_tol_abs").get<double>(), 1e-11);
  EXPECT_EQ(j.at("hits").size(), 2u);
  EXPECT_EQ(problem_from_json(j.at("problem")), load_problem(SPECTRA_SAMPLES "/two_plus_one.json"));
  EXPECT_EQ(Json::parse(j.dump()), j);
}

TEST(Cli, GapReport) {
  const RunResult r = run("gap --problem " + sample("two_plus_one.json") + " --lambda 0");
  ASSERT_EQ(r.code, 0);
  const auto l = lines(r.out);
  ASSERT_GE(l.size(), 4u);
  EXPECT_EQ(l[0], "quantity,value");
  EXPECT_NEAR(std::stod(split(l[2])[1]), -2.0, 1e-6);
  EXPECT_NEAR(std::stod(split(l[3])[1]), 3.0, 1e-6);
}

TEST(Cli, InertiaGridIsMonotone) {
  const RunResult r = run("inertia --problem " + sample("quartic64.json") + " --grid 0.5 200 40");
  ASSERT_EQ(r.code, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 42u);
  EXPECT_EQ(l[0], "lambda,nu");
  long prev = -1;
  for (std::size_t i = 1; i < l.size(); ++i) {
    const long nu = std::stol(split(l[i])[1]);
    EXPECT_GE(nu, prev);
    prev = nu;
  }
  EXPECT_GT(prev, 0);
}

TEST(Cli, InertiaSinglePoint) {
  const RunResult r = run("inertia --problem " + sample("two_plus_one.json") + " --grid 2 2 0");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "lambda,nu\n2,1\n");
}

TEST(Cli, ThreadCountDoesNotChangeOutput) {
  const std::string args = "inertia --problem " + sample("quartic64.json") + " --grid 0.5 200 64";
  const RunResult one = run(args + " --threads 1");
  const RunResult four = run(args + " --threads 4");
  const RunResult env = run(args, "SPECTRA_THREADS=3");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(one.out, env.out);
  EXPECT_EQ(run(args, "SPECTRA_THREADS=zero").code, 2);
  EXPECT_EQ(run(args + " --threads 0").code, 2);
}

TEST(Cli, CurvesNegativeCountEqualsInertia) {
  const std::string grid = " --grid 0.5 120 24";
  const RunResult c = run("curves --problem " + sample("quartic64.json") + grid + " --curves 12");
  const RunResult n = run("inertia --problem " + sample("quartic64.json") + grid);
  ASSERT_EQ(c.code, 0);
  ASSERT_EQ(n.code, 0);
  const auto cl = lines(c.out);
  const auto nl = lines(n.out);
  ASSERT_EQ(cl.size(), nl.size());
  EXPECT_EQ(split(cl[0]).size(), 13u);
  for (std::size_t i = 1; i < cl.size(); ++i) {
    const auto cells = split(cl[i]);
    long neg = 0;
    for (std::size_t k = 1; k < cells.size(); ++k) {
      const double v = std::stod(cells[k]);
      EXPECT_LE(v, 1.0);
      if (v < 0.0) ++neg;
    }
    EXPECT_EQ(neg, std::stol(split(nl[i])[1])) << cl[i];
  }
}

TEST(Cli, OutFileMatchesStdout) {
  const auto path = temp_file("eig.csv");
  const std::string args = "eig --problem " + sample("two_plus_one.json") + " --interval -1.9 2.9";
  const RunResult to_file = run(args + " --out \"" + path.string() + "\"");
  ASSERT_EQ(to_file.code, 0);
  EXPECT_TRUE(to_file.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), run(args).out);
  std::filesystem::remove(path);
}

TEST(Cli, BudgetExceededExitsFourWithPartialOutput) {
  const auto path = temp_file("budget.json");
  ProblemSpec s = load_problem(SPECTRA_SAMPLES "/two_plus_one.json");
  s.solver.max_bisections = 2;
  std::ofstream(path) << emit_problem(s);
  const RunResult r = run("eig --problem \"" + path.string() + "\" --interval -1.9 2.9 --format json");
  EXPECT_EQ(r.code, 4);
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j.at("partial").get<bool>());
  EXPECT_EQ(j.at("config").at("max_bisections").get<int>(), 2);
  std::filesystem::remove(path);
}

TEST(Cli, FlagsOverrideProblemFileSolverBlock) {
  const RunResult r = run("eig --problem " + sample("transport256.json") +
                          " --interval -1 1 --format json --tol-abs 1e-12 --tol-rel 1e-10");
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("config").at("lambda_tol_abs").get<double>(), 1e-12);
  EXPECT_EQ(j.at("config").at("lambda_tol_rel").get<double>(), 1e-10);
  ASSERT_EQ(j.at("hits").size(), 1u);
  EXPECT_LE(std::abs(j.at("hits")[0].at("lambda").get<double>()), 1e-11);
}

TEST(Cli, VerifyQuarticSuite) {
  const RunResult r = run("verify quartic");
  EXPECT_EQ(r.code, 0);
  const auto l = lines(r.out);
  ASSERT_GE(l.size(), 2u);
  EXPECT_EQ(l[0], "criterion,name,result,seconds,notes");
  for (std::size_t i = 1; i < l.size(); ++i) EXPECT_NE(l[i].find(",pass,"), std::string::npos) << l[i];
}
