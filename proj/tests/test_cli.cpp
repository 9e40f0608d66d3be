#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("varflow_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunResult run(const std::string& args, const std::string& tag) {
  const fs::path dir = scratch("io_" + tag);
  const std::string cmd = std::string(VARFLOW_EXE) + " " + args + " > " + (dir / "stdout").string() +
                          " 2> " + (dir / "stderr").string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(dir / "stdout");
  r.err = slurp(dir / "stderr");
  return r;
}

std::string config(const std::string& name) { return std::string(VARFLOW_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST(Cli, ListsSuites) {
  const RunResult r = run("--list", "list");
  EXPECT_EQ(r.status, 0);
  for (const char* s : {"verify", "vary", "decompose", "simulate"}) {
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
  }
}

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("frobnicate", "bogus").status, 2);
  EXPECT_EQ(run("verify --config /nonexistent/manifest.yaml", "missing").status, 2);
  EXPECT_EQ(run("verify --tol-scale 0 --out " + scratch("tol").string(), "tol").status, 2);
}

TEST(Cli, VerifyPassesAndWritesReports) {
  const fs::path out = scratch("verify");
  const RunResult r = run("verify --config " + config("default.yaml") + " --out " + out.string(), "verify");
  ASSERT_EQ(r.status, 0) << r.err;
  int passed = 0;
  int failed = -1;
  ASSERT_EQ(std::sscanf(r.out.c_str(), "verify: %d passed, %d failed", &passed, &failed), 2) << r.out;
  EXPECT_GE(passed, 20);
  EXPECT_EQ(failed, 0);

  std::istringstream lines(slurp(out / "report.jsonl"));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const nlohmann::json j = nlohmann::json::parse(line);
    for (const char* key : {"suite", "anchor", "test", "value", "reference", "residual", "tolerance", "pass"}) {
      EXPECT_TRUE(j.contains(key)) << key << " missing in " << line;
    }
    EXPECT_EQ(j["suite"], "verify");
    ++count;
  }
  EXPECT_EQ(count, passed);
  EXPECT_EQ(slurp(out / "summary.csv").rfind("suite,anchor,test,value,reference,residual,tolerance,pass\n", 0), 0u);
}

TEST(Cli, RejectedVariationExitsWithTwo) {
  const RunResult r = run("vary --config " + config("bad_variation.yaml") + " --out " + scratch("bad").string(), "bad");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("normal matching"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("radial_surface_only"), std::string::npos) << r.err;
}

TEST(Cli, EquilibriumRadiusStaysConstant) {
  const fs::path out = scratch("equilibrium");
  const RunResult r = run("simulate --config " + config("equilibrium.yaml") + " --out " + out.string(), "eq");
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream ts(slurp(out / "timeseries.csv"));
  std::string line;
  std::getline(ts, line);
  EXPECT_EQ(line.rfind("t,R,", 0), 0u);
  int rows = 0;
  while (std::getline(ts, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    EXPECT_NEAR(std::stod(line.substr(a + 1, b - a - 1)), 1.0, 1e-12) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 9);
  EXPECT_TRUE(fs::exists(out / "profile_A.csv"));
  EXPECT_TRUE(fs::exists(out / "profile_B.csv"));
}

TEST(Cli, ConstantTensionRunPasses) {
  const RunResult r =
      run("simulate --config " + config("constant_tension.yaml") + " --out " + scratch("tension").string(), "tension");
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("0 failed"), std::string::npos);
}

TEST(Cli, SameSeedGivesIdenticalBytes) {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  for (const fs::path& p : {a, b}) {
    ASSERT_EQ(run("decompose --seed 9 --config " + config("default.yaml") + " --out " + p.string(), "det").status, 0);
  }
  EXPECT_EQ(slurp(a / "report.jsonl"), slurp(b / "report.jsonl"));
  EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));

  const fs::path c = scratch("det_c");
  ASSERT_EQ(run("decompose --seed 10 --config " + config("default.yaml") + " --out " + c.string(), "det").status, 0);
  EXPECT_NE(slurp(a / "report.jsonl"), slurp(c / "report.jsonl"));
}

TEST(Cli, TightenedToleranceFailsWithOne) {
  // Shrinking every tolerance by 1e-12 makes the round trips fail.
  const RunResult r = run("decompose --tol-scale 1e-12 --config " + config("default.yaml") + " --out " +
                              scratch("tight").string(),
                          "tight");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("\"pass\":false"), std::string::npos);
}
