#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#ifndef DEEPCURVES_CLI
#error "DEEPCURVES_CLI must name the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string output;
};

Run run(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() / ("deepcurves_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".log");
  const std::string cmd = std::string("\"") + DEEPCURVES_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  fs::remove(log);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("deepcurves_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const std::string& sub) const { return "--out \"" + (dir_ / sub).string() + "\""; }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  const auto r = run(out("a") + " --set bogus=1 geometry");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("unknown key 'bogus'"), std::string::npos) << r.output;
  EXPECT_EQ(run(out("a") + " --set L=1 kernel-table").code, 2);
  EXPECT_EQ(run(out("a") + " --set geometry=nowhere geometry").code, 2);
}

TEST_F(CliTest, ConfigFileLineDiagnostics) {
  std::ofstream(dir_ / "bad.cfg") << "L=10\nM=x\n";
  const auto r = run("--config \"" + (dir_ / "bad.cfg").string() + "\" geometry");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("bad.cfg:2: key 'M'"), std::string::npos) << r.output;
}

TEST_F(CliTest, GeometryWritesSidecars) {
  const auto r = run(out("g") + " --set curve_samples=256 geometry");
  ASSERT_EQ(r.code, 0) << r.output;
  ASSERT_TRUE(fs::exists(dir_ / "g" / "geometry.json"));
  ASSERT_TRUE(fs::exists(dir_ / "g" / "curves.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir_ / "g" / "curves.csv.meta.json"));
  EXPECT_FALSE(meta["library_version"].get<std::string>().empty());
  EXPECT_EQ(meta["subcommand"], "geometry");
  EXPECT_EQ(meta["config"]["curve_samples"], 256);
  EXPECT_EQ(meta["config"]["geometry"], "two_circles");
  const auto geo = nlohmann::json::parse(slurp(dir_ / "g" / "geometry.json"));
  EXPECT_EQ(geo["clover"], 0);
  EXPECT_GT(geo["len"].get<double>(), 0.0);

  // the written samples load back as an instance with the same lengths
  const auto r2 = run(out("h") + " --set curve_samples=256 --set curves_csv=\"" + (dir_ / "g" / "curves.csv").string() + "\" geometry");
  ASSERT_EQ(r2.code, 0) << r2.output;
  const auto geo2 = nlohmann::json::parse(slurp(dir_ / "h" / "geometry.json"));
  EXPECT_NEAR(geo2["len"].get<double>(), geo["len"].get<double>(), 1e-6 * geo["len"].get<double>());
}

TEST_F(CliTest, DeterministicOutputs) {
  const std::string args = " --seed 3 --set M=32 --set curve_samples=256 --set L=20 ";
  ASSERT_EQ(run(out("a") + args + "certificate").code, 0);
  ASSERT_EQ(run(out("b") + args + "certificate").code, 0);
  const auto a = slurp(dir_ / "a" / "certificate.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "certificate.csv"));
  EXPECT_EQ(a.substr(0, a.find('\n')), "component,t,s,g,zeta,residual");
}

TEST_F(CliTest, ConstructiveDepthCheck) {
  const auto r = run(out("n") + " --set L=50 --set M=64 --set curve_samples=256 neumann");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("depth must be at least"), std::string::npos) << r.output;
  EXPECT_EQ(run(out("n") + " --set solver=pinv neumann").code, 2);
}

TEST_F(CliTest, NumericFailureExitCode) {
  std::ofstream csv(dir_ / "flat.csv");
  csv << "component,t,x0,x1,x2\n";
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 16; ++i) csv << (c ? "-" : "+") << ',' << i / 16.0 << ",1,0,0\n";
  csv.close();
  const auto r = run(out("f") + " --set curve_samples=256 --set curves_csv=\"" + (dir_ / "flat.csv").string() + "\" geometry");
  EXPECT_EQ(r.code, 3) << r.output;
}
