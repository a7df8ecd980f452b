#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "tempsep/error.hpp"
#include "tempsep/io.hpp"

namespace tempsep::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("tempsep_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  RunConfig config(const std::string& sub) const {
    RunConfig c;
    c.output = (root_ / sub).string();
    return c;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path root_;
};

TEST_F(CliTest, DerivsWritesPublishedColumns) {
  auto c = config("mono");
  std::ostringstream log;
  EXPECT_EQ(cmd_derivs(c, log), kExitOk);
  const std::string csv = slurp(fs::path(c.output) / "derivatives.csv");
  EXPECT_NE(csv.find("\n1,2.00000e+00\n"), std::string::npos);
  const auto json = io::read_json((fs::path(c.output) / "derivatives.json").string());
  EXPECT_EQ(json.at("derivatives").size(), 25u);
}

TEST_F(CliTest, DerivsBremsstrahlungLowOrders) {
  auto c = config("brems");
  c.spectrum = "bremsstrahlung";
  c.M = 2;
  std::ostringstream log;
  ASSERT_EQ(cmd_derivs(c, log), kExitOk);
  EXPECT_EQ(slurp(fs::path(c.output) / "derivatives.csv"),
            "n,theta_n\n0,1.00000e+00\n1,-6.00000e+00\n2,1.32000e+02\n");
  c.M = 0;
  ASSERT_EQ(cmd_derivs(c, log), kExitOk);
  EXPECT_EQ(slurp(fs::path(c.output) / "derivatives.csv"), "n,theta_n\n0,1.00000e+00\n");
}

TEST_F(CliTest, CfWritesCurvesAndDefects) {
  auto c = config("cf");
  c.taylor_N = {4, 8, 12};
  c.y_max = 0.3;
  c.curve_points = 31;
  std::ostringstream log;
  ASSERT_EQ(cmd_cf(c, log), kExitOk);
  const std::string taylor = slurp(fs::path(c.output) / "taylor_curves.csv");
  EXPECT_EQ(std::count(taylor.begin(), taylor.end(), '\n'), 1 + 3 * 31);
  EXPECT_TRUE(fs::exists(fs::path(c.output) / "selection.json"));

  auto full = config("cf_full");
  ASSERT_EQ(cmd_cf(full, log), kExitOk);
  const auto sel = io::read_json((fs::path(full.output) / "selection.json").string());
  for (int n : {18, 20, 22, 24}) {
    EXPECT_TRUE(sel.at("levels").at(n).at("report").at("defects").empty()) << n;
  }
}

TEST_F(CliTest, ValidationNamesTheField) {
  auto c = config("bad");
  c.cells = 1;
  try {
    validate(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'cells'"), std::string::npos);
  }
  c = config("bad");
  c.theta = "constant:-1";
  EXPECT_THROW(validate(c), Error);
  c = config("bad");
  c.energy = "four";
  EXPECT_THROW(validate(c), Error);
  c = config("bad");
  c.N = "25";
  EXPECT_THROW(validate(c), Error);
}

TEST_F(CliTest, ExitCodes) {
  std::ostringstream log;
  std::ostringstream err;
  auto bad = config("x");
  bad.spectrum = "laser";
  EXPECT_EQ(run_guarded(cmd_derivs, bad, log, err), kExitValidation);

  auto wrong_norm = config("y");
  wrong_norm.energy = "5";  // I_4 != 4 I_3
  EXPECT_EQ(run_guarded(cmd_derivs, wrong_norm, log, err), kExitValidation);

  auto pole = config("z");
  pole.theta = "cf:1";  // pole at y = 1/2
  EXPECT_EQ(run_guarded(cmd_solve, pole, log, err), kExitNumerical);

  auto control = config("control");
  control.spectrum = "bremsstrahlung";
  control.x_min = 1e-8;
  control.cells = 800;
  control.theta = "constant:1";
  EXPECT_EQ(run_guarded(cmd_verify, control, log, err), kExitVerification);
}

TEST_F(CliTest, OutputsAreDeterministic) {
  auto a = config("a");
  auto b = config("b");
  b.jobs = 4;
  for (auto* c : {&a, &b}) {
    c->cells = 120;
    c->M = 12;
    c->curve_points = 21;
    c->taylor_N = {4, 8};
  }
  std::ostringstream log;
  ASSERT_EQ(cmd_reproduce(a, log), cmd_reproduce(b, log));
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.output)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a.output);
    const auto other = fs::path(b.output) / rel;
    ASSERT_TRUE(fs::exists(other)) << rel;
    if (rel == "manifest.json") {
      auto ma = io::read_json(entry.path().string());
      auto mb = io::read_json(other.string());
      EXPECT_TRUE(ma.contains("created_utc"));
      ma.erase("created_utc");
      mb.erase("created_utc");
      EXPECT_EQ(ma.dump(), mb.dump());
    } else {
      EXPECT_EQ(slurp(entry.path()), slurp(other)) << rel;
    }
    ++compared;
  }
  EXPECT_GT(compared, 10u);
}

}  // namespace
}  // namespace tempsep::cli
