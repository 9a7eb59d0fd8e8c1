#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include <chatter/cli.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::initializer_list<const char *> args) {
  std::vector<const char *> argv{"chatter"};
  argv.insert(argv.end(), args);
  std::ostringstream out, err;
  const int code = chatter::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Value printed after "<key>: " on its own line.
double field(const std::string &text, const std::string &key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ": ", 0) == 0) return std::stod(line.substr(key.size() + 2));
  throw std::runtime_error("no field " + key);
}

// Measured value in the "name  measured  predicted  deviation" table.
double measured(const std::string &text, const std::string &name) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string head;
    double m = 0;
    if (ls >> head && head == name && ls >> m) return m;
  }
  throw std::runtime_error("no row " + name);
}

std::string slurp(const fs::path &p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

class TempDir {
public:
  TempDir() : path_(fs::temp_directory_path() / ("chatter_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string &name) const { return (path_ / name).string(); }

private:
  fs::path path_;
};

} // namespace

TEST(CliPredict, Relay) {
  const auto r = run({"predict", "--controller", "fosmc", "--M", "66", "--mu", "0.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "A"), 8.40338, 1e-5);
  EXPECT_NEAR(field(r.out, "omega"), 5.0, 1e-12);
  EXPECT_NEAR(field(r.out, "P"), 882.710, 1e-3);
}

TEST(CliPredict, SuperTwisting) {
  const auto r = run({"predict", "--controller", "sta", "--k1", "6.7262", "--k2", "11", "--mu", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "A"), 5.602e-3, 5e-7);
  EXPECT_NEAR(field(r.out, "omega"), 70.711, 5e-3);
}

TEST(CliPredict, CsvOutput) {
  TempDir dir;
  const auto path = dir.file("p.csv");
  const auto r = run({"predict", "--controller", "fosmc", "--M", "1.1", "--mu", "0.1", "--out", path.c_str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(path);
  std::istringstream in(text);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "controller,mu,A,omega,P,hb_residual");
  ASSERT_EQ(row.rfind("fosmc,", 0), 0u) << row;
  std::istringstream fields(row.substr(6));
  double mu = 0, A = 0;
  char comma = 0;
  fields >> mu >> comma >> A;
  EXPECT_DOUBLE_EQ(mu, 0.1);
  EXPECT_NEAR(A, 2 * 1.1 * 0.1 / std::numbers::pi, 1e-15);
}

TEST(CliPredict, InvalidGainIsUsageError) {
  const auto r = run({"predict", "--controller", "sta", "--k1", "0", "--k2", "1.1", "--mu", "0.01"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("k1 must be positive"), std::string::npos) << r.err;
}

TEST(CliPredict, MissingFlags) {
  EXPECT_EQ(run({"predict", "--controller", "sta", "--k1", "1", "--mu", "0.01"}).code, 2);
  EXPECT_EQ(run({"predict", "--M", "1", "--mu", "0.01"}).code, 2);
  EXPECT_EQ(run({"predict", "--controller", "pid", "--M", "1", "--mu", "0.01"}).code, 2);
  EXPECT_EQ(run({"predict", "--controller", "fosmc", "--M", "1", "--k1", "2", "--mu", "0.01"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(CliHelp, ExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST(CliDesign, AmplitudeObjective) {
  const auto r = run({"design", "--Delta", "1", "--objective", "amplitude"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "k1"), 2.127, 5e-4);
  EXPECT_NEAR(field(r.out, "k2"), 1.1, 1e-12);
  EXPECT_NEAR(field(r.out, "A/mu^2"), 5.6023, 5e-4);
  EXPECT_NE(r.out.find(": yes"), std::string::npos);
}

TEST(CliDesign, PowerObjective) {
  const auto r = run({"design", "--Delta", "1", "--objective", "power"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "k1"), 1.504, 5e-4);
  EXPECT_NEAR(field(r.out, "P/mu^2"), 6.6203, 5e-4);
}

TEST(CliDesign, LargeDisturbance) {
  const auto r = run({"design", "--Delta", "60"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "k1"), 16.475, 1e-3);
  EXPECT_NEAR(field(r.out, "k2"), 66.0, 1e-9);
  EXPECT_EQ(run({"design", "--Delta", "0"}).code, 2);
  EXPECT_EQ(run({"design", "--Delta", "1", "--objective", "speed"}).code, 2);
}

TEST(CliSimulate, MinimumAmplitudeGains) {
  const auto r = run({"simulate", "--controller", "sta", "--k1", "6.7262", "--k2", "11", "--mu", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(measured(r.out, "A"), 5.653e-3, 0.03 * 5.653e-3);
}

TEST(CliSimulate, RelayPower) {
  const auto r = run({"simulate", "--controller", "fosmc", "--M", "66", "--mu", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(measured(r.out, "P"), 926.899, 0.02 * 926.899);
}

TEST(CliSimulate, ZeroGainStubHasNoOscillation) {
  const auto r = run({"simulate", "--controller", "fosmc", "--M", "0", "--mu", "0.01", "--t-end", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no steady oscillation"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(CliSimulate, StructuralErrorsAreUsageErrors) {
  EXPECT_EQ(run({"simulate", "--controller", "fosmc", "--M", "1", "--mu", "0.01", "--h", "0.01"}).code, 2);
  EXPECT_EQ(run({"simulate", "--controller", "fosmc", "--M", "1", "--mu", "-1"}).code, 2);
}

TEST(CliSimulate, WritesTrajectoryAndReport) {
  TempDir dir;
  const auto traj = dir.file("t.csv"), rep = dir.file("r.csv");
  const auto r = run({"simulate", "--controller", "fosmc", "--M", "1.1", "--mu", "0.01", "--stride", "10",
                      "--out", traj.c_str(), "--report", rep.c_str()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(traj).rfind("t,x,xdot,u,ubar\n", 0), 0u);
  EXPECT_EQ(slurp(rep).rfind("A_meas,omega_meas,P_meas,A_max,t_start,t_end,n_periods\n", 0), 0u);
}

TEST(CliConfig, FileWithOverrides) {
  TempDir dir;
  const auto path = dir.file("c.json");
  {
    std::ofstream f(path);
    f << chatter::serialize_config(chatter::make_config(chatter::FosmcGain{66.0}, 0.2));
  }
  auto r = run({"predict", "--config", path.c_str()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "A"), 8.40338, 1e-5);
  r = run({"predict", "--config", path.c_str(), "--mu", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "A"), 4.20169, 1e-5);

  {
    std::ofstream f(path);
    f << R"({"controller.type": "fosmc", "controller.M": 1, "actuator.mu": 0.1, "bogus": 3})";
  }
  r = run({"predict", "--config", path.c_str()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(run({"predict", "--config", dir.file("missing.json").c_str()}).code, 2);
}

TEST(CliSweep, PredictionsToStdout) {
  const auto r = run({"sweep", "--controller", "fosmc", "--M", "1.1", "--var", "mu", "--values", "0.01,0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mu,A_hb,omega_hb,P_hb\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\n0.10000000000000001,"), std::string::npos) << r.out;
}

TEST(CliSweep, RangeAndErrors) {
  TempDir dir;
  const auto path = dir.file("s.csv");
  auto r = run({"sweep", "--controller", "sta", "--k1", "2", "--k2", "1.1", "--var", "mu", "--range",
                "0.001,1,4", "--out", path.c_str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_EQ(run({"sweep", "--controller", "fosmc", "--M", "1", "--var", "mu", "--values", "0.1"}).code, 2);
  EXPECT_EQ(run({"sweep", "--controller", "fosmc", "--M", "1", "--var", "k1", "--values", "1,2"}).code, 2);
  EXPECT_EQ(run({"sweep", "--controller", "fosmc", "--M", "1", "--var", "zeta", "--values", "1,2"}).code, 2);
}

TEST(CliReproduce, FigureToFile) {
  TempDir dir;
  const auto path = dir.file("fig3.csv");
  const auto r = run({"reproduce", "fig3", "--out", path.c_str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(path);
  EXPECT_NE(text.find("mu,A_fosmc,omega_fosmc,P_fosmc,A_sta,omega_sta,P_sta\n"), std::string::npos);
  EXPECT_EQ(run({"reproduce", "table9"}).code, 2);
}

TEST(CliHelp, SubcommandHelpListsStepFlag) {
  const auto r = run({"simulate", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--h "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("--stride"), std::string::npos);
}
