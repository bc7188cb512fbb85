#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "subprime_cli/commands.hpp"
#include "subprime_cli/output.hpp"
#include "subprime_cli/scenario_io.hpp"

namespace subprime::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kReference = fs::path(SUBPRIME_SOURCE_DIR) / "scenarios" / "trap_reference.json";

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("subprime_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out.push_back(line);
  }
  return out;
}

void write_json(const fs::path& p, const json& doc) { std::ofstream(p) << doc.dump(2); }

TEST(ParseScenario, ReferenceFile) {
  const auto sc = load_scenario(kReference);
  EXPECT_DOUBLE_EQ(sc.config.groups[1].true_variance, 0.8);
  EXPECT_DOUBLE_EQ(sc.config.priors[0].scale, 17.66);
  EXPECT_EQ(sc.config.horizon, 1000u);
  EXPECT_EQ(sc.config.base_seed, 20240601u);
  EXPECT_EQ(sc.config.subsidy_mode, engine::SubsidyMode::None);
}

TEST(ParseScenario, ErrorsNameTheKeyPath) {
  json doc = read_json_file(kReference);
  doc["groups"]["W"]["mean"] = "one";
  try {
    parse_scenario(doc);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("groups.W.mean"), std::string::npos) << e.what();
  }
  doc = read_json_file(kReference);
  doc["banks"]["H"].erase("alpha");
  try {
    parse_scenario(doc);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("banks.H.alpha"), std::string::npos) << e.what();
  }
}

TEST(ParseScenario, MalformedJsonReportsPosition) {
  TempDir dir;
  const auto p = dir.path() / "bad.json";
  std::ofstream(p) << "{\n  \"groups\": [1,\n}";
  try {
    read_json_file(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseScenario, RoundTripThroughJson) {
  const auto sc = load_scenario(kReference);
  const auto again = parse_scenario(to_json(sc.config, sc.guarantee_spec));
  EXPECT_EQ(to_json(again.config, again.guarantee_spec), to_json(sc.config, sc.guarantee_spec));
}

TEST(ParseMode, Spellings) {
  EXPECT_EQ(parse_mode("baseline"), engine::SubsidyMode::None);
  EXPECT_EQ(parse_mode("adaptive-var"), engine::SubsidyMode::AdaptiveVar);
  EXPECT_EQ(parse_mode("adaptive_es"), engine::SubsidyMode::AdaptiveEs);
  EXPECT_EQ(parse_mode("guarantee"), engine::SubsidyMode::CustomGuarantee);
  EXPECT_THROW(parse_mode("sometimes"), std::invalid_argument);
  EXPECT_EQ(parse_aggregation("independent"), risk::Aggregation::Independent);
}

TEST(SetByPath, RequiresExistingKey) {
  json doc = read_json_file(kReference);
  set_by_path(doc, "banks.L.alpha", 0.01);
  EXPECT_EQ(doc["banks"]["L"]["alpha"], 0.01);
  EXPECT_THROW(set_by_path(doc, "banks.L.beta", 1.0), ParseError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Thresholds, ReferenceOutput) {
  CommandOptions opts;
  opts.scenario = kReference;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(cmd_thresholds(opts, out, err), 0) << err.str();
  const auto text = out.str();
  EXPECT_NE(text.find("sigma2_L_uni     3.326503585"), std::string::npos) << text;
  EXPECT_NE(text.find("sigma2_H_pool    4.730668763"), std::string::npos) << text;
  EXPECT_NE(text.find("H_pool: PASS"), std::string::npos) << text;
  EXPECT_EQ(text.find("warning"), std::string::npos) << text;
  EXPECT_EQ(text.find("[FAIL]"), std::string::npos) << text;
}

TEST(Thresholds, WarnsForLargeAlpha) {
  TempDir dir;
  json doc = read_json_file(kReference);
  doc["banks"]["L"]["alpha"] = 0.2;
  write_json(dir.path() / "s.json", doc);
  CommandOptions opts;
  opts.scenario = dir.path() / "s.json";
  opts.validate = false;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(cmd_thresholds(opts, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("warning: bank L alpha = 0.2"), std::string::npos) << out.str();
}

TEST(Thresholds, FloorAboveMeanGivesZeroThreshold) {
  TempDir dir;
  json doc = read_json_file(kReference);
  doc["banks"]["L"]["rho"] = 1.5;
  write_json(dir.path() / "s.json", doc);
  CommandOptions opts;
  opts.scenario = dir.path() / "s.json";
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(cmd_thresholds(opts, out, err), 1);
  EXPECT_NE(out.str().find("sigma2_L_uni     0\n"), std::string::npos) << out.str();
  EXPECT_NE(err.str().find("trap assumptions not satisfied"), std::string::npos);
  opts.validate = false;
  EXPECT_EQ(cmd_thresholds(opts, out, err), 0);
}

TEST(Simulate, WritesArtifactsDeterministically) {
  TempDir dir;
  CommandOptions opts;
  opts.scenario = kReference;
  opts.mode = "adaptive-var";
  opts.horizon = 300;
  opts.replications = 1;
  std::ostringstream out;
  std::ostringstream err;
  opts.out = dir.path() / "a";
  ASSERT_EQ(cmd_simulate(opts, out, err), 0) << err.str();
  opts.out = dir.path() / "b";
  ASSERT_EQ(cmd_simulate(opts, out, err), 0) << err.str();

  for (const char* name : {"trajectory.csv", "beliefs.csv", "summary.json", "manifest.json"}) {
    EXPECT_EQ(slurp(dir.path() / "a" / name), slurp(dir.path() / "b" / name)) << name;
  }
  const auto traj = lines(slurp(dir.path() / "a" / "trajectory.csv"));
  ASSERT_EQ(traj.size(), 301u);
  EXPECT_EQ(traj[0], kTrajectoryHeader);
  const auto bel = lines(slurp(dir.path() / "a" / "beliefs.csv"));
  EXPECT_EQ(bel[0], kBeliefsHeader);
  EXPECT_EQ(bel.size(), 301u);

  const json manifest = json::parse(slurp(dir.path() / "a" / "manifest.json"));
  ASSERT_EQ(manifest["outputs"].size(), 3u);
  for (const auto& entry : manifest["outputs"]) {
    EXPECT_EQ(entry["sha256"], sha256_file(dir.path() / "a" / entry["file"].get<std::string>()));
  }
  const json summary = json::parse(slurp(dir.path() / "a" / "summary.json"));
  EXPECT_TRUE(summary["escaped"].get<bool>());
}

TEST(Simulate, RejectsScenarioViolatingAssumptions) {
  TempDir dir;
  json doc = read_json_file(kReference);
  doc["groups"]["B"]["credit_file"]["completeness"] = 1.0;
  write_json(dir.path() / "s.json", doc);
  CommandOptions opts;
  opts.scenario = dir.path() / "s.json";
  opts.out = dir.path() / "out";
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(cmd_simulate(opts, out, err), 1);
  EXPECT_NE(err.str().find("A2"), std::string::npos) << err.str();
  opts.validate = false;
  EXPECT_EQ(cmd_simulate(opts, out, err), 0) << err.str();
}

TEST(Sweep, InitialBeliefFallsWithCompleteness) {
  TempDir dir;
  write_json(dir.path() / "sweep.json", {{"parameter", "groups.B.credit_file.completeness"},
                                         {"values", {0.005, 0.01, 0.02}},
                                         {"replications", 4},
                                         {"horizon", 50},
                                         {"mode", "adaptive_var"}});
  CommandOptions opts;
  opts.scenario = kReference;
  opts.sweep = dir.path() / "sweep.json";
  opts.out = dir.path() / "out";
  std::ostringstream out;
  std::ostringstream err;
  ASSERT_EQ(cmd_sweep(opts, out, err), 0) << err.str();
  const auto rows = lines(slurp(dir.path() / "out" / "sweep.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], kSweepHeader);
  std::vector<double> initial;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<std::string> cols;
    std::istringstream in(rows[i]);
    for (std::string c; std::getline(in, c, ',');) {
      cols.push_back(c);
    }
    ASSERT_GE(cols.size(), 10u) << rows[i];
    EXPECT_EQ(cols[2], "true") << rows[i];
    initial.push_back(std::stod(cols[8]));
  }
  EXPECT_GT(initial[0], initial[1]);
  EXPECT_GT(initial[1], initial[2]);
}

TEST(Sweep, EmptyGridWritesHeaderOnly) {
  TempDir dir;
  write_json(dir.path() / "sweep.json",
             {{"parameter", "banks.L.alpha"}, {"values", json::array()}});
  CommandOptions opts;
  opts.scenario = kReference;
  opts.sweep = dir.path() / "sweep.json";
  opts.out = dir.path() / "out";
  std::ostringstream out;
  std::ostringstream err;
  ASSERT_EQ(cmd_sweep(opts, out, err), 0) << err.str();
  EXPECT_EQ(slurp(dir.path() / "out" / "sweep.csv"), std::string(kSweepHeader) + "\n");
}

TEST(Sweep, InvalidPointIsMarkedAndSweepContinues) {
  TempDir dir;
  write_json(dir.path() / "sweep.json", {{"parameter", "banks.L.alpha"},
                                         {"values", {0.7, 0.05}},
                                         {"replications", 2},
                                         {"horizon", 20}});
  CommandOptions opts;
  opts.scenario = kReference;
  opts.sweep = dir.path() / "sweep.json";
  opts.out = dir.path() / "out";
  std::ostringstream out;
  std::ostringstream err;
  ASSERT_EQ(cmd_sweep(opts, out, err), 0) << err.str();
  const auto rows = lines(slurp(dir.path() / "out" / "sweep.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].rfind("banks.L.alpha,0.7,false,", 0), 0u) << rows[1];
  EXPECT_EQ(rows[2].rfind("banks.L.alpha,0.05,true,pass,", 0), 0u) << rows[2];
}

}  // namespace
}  // namespace subprime::cli
