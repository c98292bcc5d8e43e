#include "support/tempdir.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>

using testing_support::slurp;
using testing_support::TempDir;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

Run run(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(TICKZONE_CLI) + " " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

// Field `col` of the first data row whose leading fields equal `prefix`.
double field_after(const std::string& csv, const std::string& prefix, int col) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) != 0) continue;
    std::istringstream fields(line);
    std::string f;
    for (int i = 0; i <= col; ++i) std::getline(fields, f, ',');
    return std::stod(f);
  }
  ADD_FAILURE() << "no row starting with '" << prefix << "' in\n" << csv;
  return 0.0;
}

}  // namespace

TEST(Cli, SimulateEstimateRegress) {
  TempDir dir("cli_chain");
  const std::string sim = (dir / "sim").string();
  auto r = run(dir, "simulate --asset Z --tick-value 1 --eta 0.25 --sigma 0.05 --sigma-dispersion 0.3 "
                    "--trade-intensity 0.05 --days 6 --seed 5 --out " + sim);
  ASSERT_EQ(r.status, 0) << r.err;
  const std::string truth = slurp(dir / "sim/Z_truth.csv");
  EXPECT_EQ(std::count(truth.begin(), truth.end(), '\n'), 7);

  r = run(dir, "estimate --asset Z --tick-value 1 --session 09:00-17:00 " + sim + "/Z/*.csv --out " +
                   (dir / "est").string());
  ASSERT_EQ(r.status, 0) << r.err;
  const std::string daily = slurp(dir / "est/daily_records.csv");
  EXPECT_EQ(std::count(daily.begin(), daily.end(), '\n'), 7);

  r = run(dir, "regress " + (dir / "est/daily_records.csv").string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
  EXPECT_EQ(r.out.substr(r.out.find('\n') + 1, 2), "Z,");
}

TEST(Cli, SimulateIsSeedDeterministic) {
  TempDir dir("cli_seed");
  const std::string args = "simulate --asset Z --tick-value 0.5 --eta 0.3 --sigma 0.05 --seed 42 --out ";
  ASSERT_EQ(run(dir, args + (dir / "a").string()).status, 0);
  ASSERT_EQ(run(dir, args + (dir / "b").string()).status, 0);
  EXPECT_EQ(slurp(dir / "a/Z/Z_2009-05-15.csv"), slurp(dir / "b/Z/Z_2009-05-15.csv"));
}

TEST(Cli, PredictBobl) {
  TempDir dir("cli_predict");
  const auto r = run(dir, "predict --alpha0 5 --alpha 10 --eta0 0.268 --p1 0.91 --p2 0.08 --version 1");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(first_line(r.out),
            "version,beta,eta_pred,large_tick_regime,market_order_cost,m_pred,one_tick_spread,warning");
  EXPECT_NEAR(field_after(r.out, "1,1,", 2), 0.164, 1e-3);
  EXPECT_NEAR(field_after(r.out, "1,0.5,", 2), 0.124, 1e-3);
}

TEST(Cli, OptimalTickFixture) {
  TempDir dir("cli_tick");
  const auto r = run(dir, "optimal-tick --version 1 --asset ESX");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
  EXPECT_NEAR(field_after(r.out, "ESX,10,1,", 3), 1.3, 0.1);
  EXPECT_NEAR(field_after(r.out, "ESX,10,1,", 4), 2.6, 0.1);
}

TEST(Cli, PipelineOnEmptyDirectory) {
  TempDir dir("cli_empty");
  std::filesystem::create_directories(dir / "in");
  const auto r = run(dir, "pipeline " + (dir / "in").string() + " --tick-value 1");
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.err.find("no input"), std::string::npos) << r.err;
}

TEST(Cli, RejectsBadArguments) {
  TempDir dir("cli_bad");
  EXPECT_EQ(run(dir, "predict --alpha0 5 --alpha 10 --eta0 0.2 --beta 2").status, 1);
  EXPECT_NE(run(dir, "predict --alpha0 5 --alpha 10 --eta0 0.2 --beta 2").err.find("--beta"), std::string::npos);
  EXPECT_NE(run(dir, "simulate --tick-value 1 --eta 0.2 --seed -3 --out " + (dir / "x").string()).status, 0);
  EXPECT_NE(run(dir, "frobnicate").status, 0);
  EXPECT_EQ(run(dir, "estimate --tick-value 1 /nonexistent.csv").status, 2);
}

TEST(Cli, ConfigFileAndFlagOverride) {
  TempDir dir("cli_config");
  testing_support::write_file(dir / "p.cfg", "alpha0 = 5\nalpha = 10\neta0 = 0.268\np1 = 0.91\np2 = 0.08\n");
  auto r = run(dir, "predict --config " + (dir / "p.cfg").string() + " --version 1 --beta 1");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NEAR(field_after(r.out, "1,1,", 2), 0.164, 1e-3);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
  r = run(dir, "predict --config " + (dir / "p.cfg").string() + " --alpha 5 --version 1 --beta 1");
  EXPECT_NEAR(field_after(r.out, "1,1,", 2), 0.268, 1e-12);
  testing_support::write_file(dir / "bad.cfg", "alpha_zero = 5\n");
  r = run(dir, "predict --config " + (dir / "bad.cfg").string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("alpha_zero"), std::string::npos);
}
