#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace sorites;
using namespace sorites::cli;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("sorites_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string emit(const std::string& kind, int n = 3) {
    const auto path = (dir_ / (kind + std::to_string(n) + ".json")).string();
    std::ostringstream out, err;
    EXPECT_EQ(cmd_emit_model(kind, n, path, out, err), kExitOk) << err.str();
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::ostringstream out, err;
  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_binary(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(SORITES_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string text;
  char buf[4096];
  while (std::size_t k = std::fread(buf, 1, sizeof buf, p)) text.append(buf, k);
  const int status = ::pclose(p);
  if (output) *output = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_F(Cli, ChainReport) {
  const auto p = path("chain.csv");
  EXPECT_EQ(cmd_chain_report(45, false, p, out, err), kExitOk);
  const auto csv = slurp(p);
  EXPECT_NE(csv.find("\nexperiments,46\n"), std::string::npos);
  EXPECT_NE(csv.find("\n90,1.0,"), std::string::npos);
  EXPECT_NE(csv.find("\n0,0.0,0.0\n"), std::string::npos);
  EXPECT_EQ(cmd_chain_report(4, false, std::nullopt, out, err), kExitInput);
  EXPECT_EQ(cmd_chain_report(45, false, "/nonexistent/dir/x.csv", out, err), kExitOutput);
}

TEST_F(Cli, CheckExamples) {
  EXPECT_EQ(cmd_check(emit("trivial-lift"), {"pi", "weak-ha"}, true, {}, out, err), kExitOk);
  EXPECT_NE(out.str().find("pi: holds"), std::string::npos);

  out.str("");
  EXPECT_EQ(cmd_check(emit("zero-dashed"), {"weak-surface-autonomy"}, true, {}, out, err), kExitFailed);
  EXPECT_NE(out.str().find("pair (3,0)"), std::string::npos) << out.str();

  const auto good = slurp(emit("trivial-lift"));
  auto bad = good;
  const auto at = bad.find("\"1/8\"");
  ASSERT_NE(at, std::string::npos);
  bad.replace(at, 5, "\"0.124\"");
  std::ofstream(path("bad.json")) << bad;
  err.str("");
  EXPECT_EQ(cmd_check(path("bad.json"), {"pi"}, true, {}, out, err), kExitInput);
  EXPECT_NE(err.str().find("NotNormalized"), std::string::npos) << err.str();
  EXPECT_NE(err.str().find("bad.json:"), std::string::npos);

  EXPECT_EQ(cmd_check(emit("trivial-lift"), {"no-such"}, true, {}, out, err), kExitInput);
  EXPECT_EQ(cmd_check(path("missing.json"), {"pi"}, true, {}, out, err), kExitInput);
}

TEST_F(Cli, CheckWritesReport) {
  CommonOptions opt;
  opt.out = path("report.json");
  EXPECT_EQ(cmd_check(emit("strictness-ip"), {"improved-predictions", "oi"}, true, opt, out, err), kExitFailed);
  const auto vs = io::check_report_from_json<Rational>(io::json::parse(slurp(*opt.out)));
  ASSERT_EQ(vs.size(), 2u);
  EXPECT_TRUE(vs[0].holds);
  EXPECT_FALSE(vs[1].holds);

  opt.out = "/nonexistent/dir/r.json";
  EXPECT_EQ(cmd_check(emit("strictness-ip"), {"oi"}, true, opt, out, err), kExitOutput);
}

TEST_F(Cli, TheoremExamples) {
  EXPECT_EQ(cmd_theorem(emit("trivial-lift"), "stronger", {}, out, err), kExitOk);
  EXPECT_NE(out.str().find("all λ-conditional marginals = 1/2; Improved Predictions: fails\n"), std::string::npos);
  EXPECT_NE(out.str().find("CR-Lemma(a)"), std::string::npos);
  EXPECT_NE(out.str().find("P.I."), std::string::npos);
  EXPECT_NE(out.str().find("Sorites"), std::string::npos);

  out.str("");
  EXPECT_EQ(cmd_theorem(emit("deterministic"), "stronger", {}, out, err), kExitFailed);
  EXPECT_NE(out.str().find("PremiseFailed: λ-conditional QM agreement"), std::string::npos);
  EXPECT_NE(out.str().find("link broken"), std::string::npos);

  out.str("");
  EXPECT_EQ(cmd_theorem(emit("trivial-lift"), "bell", {}, out, err), kExitFailed);
  EXPECT_NE(out.str().find("Entailment(a)"), std::string::npos);
  EXPECT_NE(out.str().find("Entailment(b)"), std::string::npos);
  EXPECT_NE(out.str().find("O.I.: fails"), std::string::npos);

  EXPECT_EQ(cmd_theorem(emit("trivial-lift"), "weaker", {}, out, err), kExitInput);
}

TEST_F(Cli, TheoremToleranceOnFullQm) {
  const auto m = emit("qm-full", 45);
  EXPECT_EQ(cmd_theorem(m, "stronger", {}, out, err), kExitFailed);
  CommonOptions opt;
  opt.tolerance = "0.002";
  EXPECT_EQ(cmd_theorem(m, "stronger", opt, out, err), kExitOk);
  opt.mode = io::NumericMode::Exact;
  EXPECT_EQ(cmd_theorem(m, "stronger", opt, out, err), kExitInput);
}

TEST_F(Cli, StrategiesAndGhz) {
  EXPECT_EQ(cmd_strategies(3, out, err), kExitOk);
  EXPECT_TRUE(out.str().starts_with("strategies,16 min_broken,1\n"));
  out.str("");
  EXPECT_EQ(cmd_ghz("enumerate", out, err), kExitOk);
  EXPECT_EQ(out.str(), "satisfying,0 total,64\n");
  EXPECT_EQ(cmd_ghz("verify", out, err), kExitOk);
  EXPECT_EQ(cmd_ghz("counterexample", out, err), kExitOk);
  EXPECT_EQ(cmd_ghz("nope", out, err), kExitInput);
  EXPECT_EQ(cmd_strategies(2, out, err), kExitInput);
}

TEST_F(Cli, SimulateIsDeterministic) {
  const auto m = emit("qm-full");
  CommonOptions a, b;
  a.out = path("a.csv");
  b.out = path("b.csv");
  EXPECT_EQ(cmd_simulate(m, "(30,0)", 100000, 42, a, out, err), kExitOk);
  EXPECT_EQ(cmd_simulate(m, "(30,0)", 100000, 42, b, out, err), kExitOk);
  const auto csv = slurp(*a.out);
  EXPECT_EQ(csv, slurp(*b.out));
  EXPECT_TRUE(csv.starts_with("alice_degrees,bob_degrees,trials,seed,n00,n01,n10,n11,matches,mismatches\n30.0,0.0,100000,42,"));
  EXPECT_EQ(cmd_simulate(m, "(45,0)", 100, 42, {}, out, err), kExitInput);
  EXPECT_EQ(cmd_simulate(m, "(60,0)", 100, 42, {}, out, err), kExitInput);
}

TEST_F(Cli, BinaryExitCodes) {
  std::string text;
  EXPECT_EQ(run_binary("strategies --n 3", &text), 0);
  EXPECT_NE(text.find("strategies,16 min_broken,1"), std::string::npos);
  EXPECT_EQ(run_binary("ghz enumerate", &text), 0);
  EXPECT_EQ(text, "satisfying,0 total,64\n");

  const auto lift = path("lift.json");
  EXPECT_EQ(run_binary("emit-model trivial-lift --n 3 --out " + lift), 0);
  EXPECT_EQ(run_binary("theorem stronger " + lift, &text), 0);
  EXPECT_NE(text.find("Improved Predictions: fails"), std::string::npos);
  EXPECT_EQ(run_binary("check " + lift + " --assumptions pi,weak-ha"), 0);
  EXPECT_EQ(run_binary("check " + lift + " --assumptions oi"), 1);

  const auto zero = path("zero.json");
  EXPECT_EQ(run_binary("emit-model zero-dashed --n 3 --out " + zero), 0);
  EXPECT_EQ(run_binary("check " + zero + " --assumptions weak-surface-autonomy"), 1);

  EXPECT_EQ(run_binary("chain-report --n 4"), 2);
  EXPECT_EQ(run_binary("chain-report --n 45 --out /nonexistent/dir/x.csv"), 3);
  EXPECT_EQ(run_binary("no-such-command"), 2);
  EXPECT_EQ(run_binary("check " + path("missing.json") + " --assumptions pi"), 2);

  const auto a = path("a.csv"), b = path("b.csv");
  EXPECT_EQ(run_binary("emit-model qm-full --n 3 --out " + path("qm.json")), 0);
  EXPECT_EQ(run_binary("simulate " + path("qm.json") + " --pair \"(30,0)\" --trials 100000 --seed 42 --out " + a), 0);
  EXPECT_EQ(run_binary("simulate " + path("qm.json") + " --pair \"(30,0)\" --trials 100000 --seed 42 --out " + b), 0);
  EXPECT_EQ(slurp(a), slurp(b));
}
