#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "treegibbs/error.hpp"

using namespace treegibbs;
using namespace treegibbs::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("treegibbs_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

// Runs the binary with stdout/stderr captured; returns the exit status.
int run(const std::string& args, const fs::path& dir, std::string* out = nullptr) {
  const fs::path o = dir / "stdout.txt", e = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + TREEGIBBS_CLI_PATH + "\" " + args + " > \"" +
                          o.string() + "\" 2> \"" + e.string() + "\"";
  const int status = std::system(cmd.c_str());
  if (out) *out = slurp(o);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json identity_config() {
  return {{"d", 2}, {"potential", {{"kind", "identity"}}}, {"A", {0, 2}}};
}

}  // namespace

TEST(Config, DefaultsApply) {
  const auto c = parse_config(json{{"potential", {{"kind", "sos"}, {"beta", 2.4}}}, {"A", {0}}});
  EXPECT_EQ(c.d, 2);
  EXPECT_EQ(c.space.kind, "window");
  EXPECT_EQ(c.tol.tail, 1e-12);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_GT(window_radius(c), 10);
}

TEST(Config, RejectsBadInput) {
  const json ok = {{"potential", {{"kind", "sos"}, {"beta", 2.4}}}, {"A", {0}}};
  auto with = [&](const char* key, json v) {
    json j = ok;
    j[key] = std::move(v);
    return j;
  };
  EXPECT_THROW(parse_config(with("bogus", 1)), InvalidArgument);
  EXPECT_THROW(parse_config(with("d", 1)), InvalidArgument);
  EXPECT_THROW(parse_config(with("d", "two")), InvalidArgument);
  EXPECT_THROW(parse_config(with("A", json::array())), InvalidArgument);
  EXPECT_THROW(parse_config(with("potential", {{"kind", "sos"}})), InvalidArgument);
  EXPECT_THROW(parse_config(with("potential", {{"kind", "gauss"}, {"beta", 1}})),
               InvalidArgument);
  EXPECT_THROW(parse_config(with("space", {{"kind", "cyclic"}})), InvalidArgument);
  EXPECT_THROW(parse_config(with("tolerances", {{"inner", -1}})), InvalidArgument);
  EXPECT_THROW(parse_config(with("samples", {{"n_grid", {8, 4}}})), InvalidArgument);
  EXPECT_THROW(parse_config(json::array()), InvalidArgument);
}

TEST(Config, CustomTableFixesRadius) {
  const auto c = parse_config(
      json{{"potential", {{"kind", "custom"}, {"table", {0.01, 0.1, 1, 0.1, 0.01}}}}, {"A", {0}}});
  EXPECT_EQ(window_radius(c), 2);
  EXPECT_THROW(parse_config(json{{"potential", {{"kind", "custom"}, {"table", {1, 0.1}}}},
                                 {"A", {0}}}),
               InvalidArgument);
}

TEST(Config, CyclicProblemReducesA) {
  auto c = default_config();
  c.space = {"cyclic", 30, 5};
  c.A = {0, 6};
  const auto p = make_problem(c);
  EXPECT_TRUE(p.space().is_cyclic());
  EXPECT_EQ(p.A, (std::vector<Element>{0, 1}));
}

TEST(Config, RoundTrips) {
  const auto c = default_config();
  const auto back = parse_config(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Thresholds, TableValuesAndShape) {
  const auto r = cmd_thresholds({}, {});
  EXPECT_EQ(r.exit_code, 0);
  const auto j = json::parse(r.files.at(r.primary).content);
  EXPECT_EQ(j.at("schema"), 1);
  const std::string text = r.files.at(0).content;
  EXPECT_NE(text.find("1.953"), std::string::npos);
  EXPECT_NE(text.find("3.924"), std::string::npos);

  GlobalOptions csv;
  csv.format = "csv";
  ThresholdOptions one;
  one.d = {2};
  one.n = {1};
  one.model = "sos";
  const auto rc = cmd_thresholds(one, csv);
  EXPECT_EQ(rc.files.at(rc.primary).content, "model,d,n,beta\nsos,2,1,1.953\n");
}

TEST(Thresholds, RejectsBadRanges) {
  ThresholdOptions t;
  t.d = {1};
  const auto r = run_guarded([&] { return cmd_thresholds(t, {}); });
  EXPECT_EQ(r.exit_code, kConfigError);
  EXPECT_EQ(json::parse(r.files.at(0).content).at("error"), "InvalidArgument");
}

TEST(Solve, DefaultConfigPasses) {
  const auto r = cmd_solve({});
  EXPECT_EQ(r.exit_code, kOk);
  const auto j = json::parse(r.files.at(r.primary).content);
  EXPECT_EQ(j.at("schema"), 1);
  EXPECT_EQ(j.at("command"), "solve");
  EXPECT_TRUE(j.at("pass").get<bool>());
}

TEST(Solve, IdentityConfigIsTrivial) {
  const auto dir = scratch("identity");
  GlobalOptions g;
  g.config = write_config(dir, identity_config()).string();
  const auto r = cmd_solve(g);
  EXPECT_EQ(r.exit_code, kOk);
  const auto j = json::parse(r.files.at(r.primary).content);
  const auto& xbar = j.at("solution").at("xbar");
  ASSERT_TRUE(xbar.is_array());
  double total = 0;
  for (const auto& v : xbar) total += v.get<double>();
  EXPECT_DOUBLE_EQ(total, 2.0);
  EXPECT_EQ(j.at("solution").at("epsilon").get<double>(), 0.0);
}

TEST(Solve, BelowThresholdReportsReason) {
  const auto dir = scratch("below");
  const auto cfg = write_config(
      dir, {{"potential", {{"kind", "sos"}, {"beta", 1.0}}}, {"A", {0}}});
  std::string out;
  EXPECT_EQ(run("solve --config \"" + cfg.string() + "\"", dir, &out), kThresholdExceeded);
  const auto j = json::parse(out);
  EXPECT_EQ(j.at("error"), "ThresholdExceeded");
  EXPECT_GT(j.at("measured").get<double>(), j.at("required").get<double>());
}

TEST(Process, UsageErrors) {
  const auto dir = scratch("usage");
  EXPECT_EQ(run("", dir), kConfigError);
  EXPECT_EQ(run("frobnicate", dir), kConfigError);
  EXPECT_EQ(run("solve --format xml", dir), kConfigError);
  EXPECT_EQ(run("solve --config /nonexistent/cfg.json", dir), kConfigError);
  EXPECT_EQ(run("thresholds --model gauss", dir), kConfigError);
  EXPECT_EQ(run("--help", dir), 0);
}

TEST(Process, MalformedConfigIsAConfigError) {
  const auto dir = scratch("malformed");
  const auto p = dir / "bad.json";
  std::ofstream(p) << "{\"d\": 2,";
  std::string out;
  EXPECT_EQ(run("solve --config \"" + p.string() + "\"", dir, &out), kConfigError);
  EXPECT_EQ(json::parse(out).at("exit_code"), kConfigError);
}

TEST(Process, ThresholdsToDirectory) {
  const auto dir = scratch("thr");
  std::string out;
  ASSERT_EQ(run("thresholds --format csv --out \"" + (dir / "o").string() + "\"", dir, &out),
            0);
  EXPECT_TRUE(fs::exists(dir / "o" / "thresholds.txt"));
  const std::string csv = slurp(dir / "o" / "thresholds.csv");
  EXPECT_NE(csv.find("log,6,10,3.924"), std::string::npos);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_NE(out.find("wrote thresholds.csv"), std::string::npos);
}

TEST(Process, SampleIsDeterministic) {
  const auto dir = scratch("det");
  json cfg = {{"potential", {{"kind", "sos"}, {"beta", 2.4}}},
              {"space", {{"radius", 30}}},
              {"A", {0, 5}},
              {"samples", {{"trees", 40}, {"depth", 2}}}};
  const auto c = write_config(dir, cfg);
  const std::string base = "sample --format csv --config \"" + c.string() + "\" --seed 7 --out ";
  ASSERT_EQ(run(base + "\"" + (dir / "a").string() + "\"", dir), 0);
  ASSERT_EQ(run(base + "\"" + (dir / "b").string() + "\"", dir), 0);
  for (const char* f : {"samples.csv", "marginal.csv"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  ASSERT_EQ(run("sample --format csv --config \"" + c.string() + "\" --seed 8 --out \"" +
                    (dir / "c").string() + "\"",
                dir),
            0);
  EXPECT_NE(slurp(dir / "a" / "samples.csv"), slurp(dir / "c" / "samples.csv"));
}

TEST(Process, DepthZeroSampleHasOneRowPerReplicate) {
  const auto dir = scratch("depth0");
  json cfg = identity_config();
  cfg["samples"] = {{"trees", 5}, {"depth", 0}};
  const auto c = write_config(dir, cfg);
  ASSERT_EQ(run("sample --format csv --config \"" + c.string() + "\" --out \"" +
                    (dir / "o").string() + "\"",
                dir),
            0);
  std::istringstream in(slurp(dir / "o" / "samples.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "replicate,vertex,depth,state");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.substr(line.find(',')), ",0,0," + line.substr(line.rfind(',') + 1));
    ++rows;
  }
  EXPECT_EQ(rows, 5);
}

TEST(Process, GgmNeedsCyclicSpace) {
  const auto dir = scratch("ggm");
  const auto c = write_config(dir, identity_config());
  EXPECT_EQ(run("ggm --config \"" + c.string() + "\"", dir), kConfigError);
}

TEST(Process, GgmPairTableFavoursLazySteps) {
  const auto dir = scratch("ggmpairs");
  json cfg = {{"potential", {{"kind", "sos"}, {"beta", 2.4}}},
              {"space", {{"kind", "cyclic"}, {"q", 5}, {"radius", 30}}},
              {"A", {0, 1}},
              {"samples",
               {{"branches", 10}, {"length", 500}, {"deloc_samples", 200}, {"n_grid", {4, 8}}}}};
  const auto c = write_config(dir, cfg);
  std::string out;
  ASSERT_EQ(run("ggm --config \"" + c.string() + "\"", dir, &out), 0);
  const auto j = json::parse(out);
  const auto& cells = j.at("pairs");
  ASSERT_FALSE(cells.empty());
  // Highest-mass cells stay inside A with no increment.
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(cells[k].at("c"), 0);
    const Element a = cells[k].at("abar");
    EXPECT_TRUE(a == 0 || a == 1);
  }
}
