#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bcg/cli.h"

namespace bcg {
namespace {

namespace fs = std::filesystem;

const std::string kS1 = std::string(BCG_DEFAULT_DATA_DIR) + "/countries/s1/";

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "bcg");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Invocation r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bcg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, GroundWritesArtifacts) {
  const Invocation r = run({"ground", "--rules", kS1 + "rules.pl", "--facts", kS1 + "train.tsv", "--roots",
                            kS1 + "test.tsv", "--width", "1", "--depth", "2", "--out", path("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"network.gmn", "proved.tsv", "stats.json", "config.toml"}) {
    EXPECT_TRUE(fs::exists(dir_ / "g" / f)) << f;
  }
  EXPECT_EQ(slurp(dir_ / "g" / "network.gmn").rfind("BCG-GMN\t1\n", 0), 0u);
}

TEST_F(CliTest, SameConfigGivesIdenticalArtifacts) {
  for (const char* sub : {"a", "b"}) {
    const Invocation r = run({"ground", "--rules", kS1 + "rules.pl", "--facts", kS1 + "train.tsv", "--roots",
                              kS1 + "test.tsv", "--width", "1", "--depth", "2", "--jobs", sub[0] == 'a' ? "1" : "2",
                              "--out", path(sub)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"network.gmn", "proved.tsv"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, ConfigFileAndOverride) {
  const std::string cfg = write("run.toml", "rules = \"" + kS1 + "rules.pl\"\nfacts = \"" + kS1 +
                                                "train.tsv\"\nroots = \"" + kS1 + "test.tsv\"\nwidth = \"1\"\n"
                                                "depth = \"1\"\n");
  const Invocation r = run({"stats", "--config", cfg, "--depth", "2", "--out", path("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string echoed = slurp(dir_ / "s" / "config.toml");
  EXPECT_NE(echoed.find("\ndepth=2\n"), std::string::npos) << echoed;
  EXPECT_TRUE(fs::exists(dir_ / "s" / "config.input.toml"));
}

TEST_F(CliTest, TrainPropagateEvalPipeline) {
  Invocation r = run({"train-kge", "--rules", kS1 + "rules.pl", "--facts", kS1 + "train.tsv", "--dim", "8",
                      "--epochs", "3", "--negatives", "2", "--out", path("kge")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "kge" / "checkpoint.kge").rfind("BCG-KGE\t1\n", 0), 0u);
  r = run({"ground", "--rules", kS1 + "rules.pl", "--facts", kS1 + "train.tsv", "--roots", kS1 + "test.tsv",
           "--width", "1", "--depth", "2", "--out", path("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"propagate", "--gmn", path("g/network.gmn"), "--checkpoint", path("kge/checkpoint.kge"), "--rules",
           kS1 + "rules.pl", "--facts", kS1 + "train.tsv", "--out", path("p")});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(dir_ / "p" / "scores.tsv"));
  r = run({"eval", "--rules", kS1 + "rules.pl", "--facts", kS1 + "train.tsv", "--valid", kS1 + "valid.tsv", "--test",
           kS1 + "test.tsv", "--checkpoint", path("kge/checkpoint.kge"), "--scores", path("p/scores.tsv"), "--ranks",
           "--out", path("e")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"report.json", "report.txt", "ranks.tsv"}) EXPECT_TRUE(fs::exists(dir_ / "e" / f)) << f;
  EXPECT_NE(slurp(dir_ / "e" / "report.json").find("\"mrr\""), std::string::npos);
}

TEST_F(CliTest, ExitCodeConfigErrors) {
  EXPECT_EQ(run({"ground", "--width", "wide", "--rules", kS1 + "rules.pl", "--out", path("o")}).code,
            kExitConfig);
  EXPECT_EQ(run({"ground", "--rules", path("missing.pl"), "--out", path("o")}).code, kExitConfig);
  EXPECT_EQ(run({"ground", "--bogus", "--out", path("o")}).code, kExitConfig);
}

TEST_F(CliTest, ExitCodeParseError) {
  const std::string rules = write("bad.pl", "p(X :- q(X).\n");
  const Invocation r = run({"ground", "--rules", rules, "--facts", kS1 + "train.tsv", "--out", path("o")});
  EXPECT_EQ(r.code, kExitParse);
  EXPECT_NE(r.err.find("parse error"), std::string::npos) << r.err;
}

TEST_F(CliTest, ExitCodeFormatError) {
  const std::string gmn = write("bad.gmn", "BCG-GMN\t9\n");
  EXPECT_EQ(run({"propagate", "--gmn", gmn, "--out", path("o")}).code, kExitParse);
}

TEST_F(CliTest, ExitCodeBudgetRefusal) {
  const Invocation r = run({"ground", "--rules", kS1 + "rules.pl", "--facts", kS1 + "train.tsv", "--uncertain",
                            "--width", "inf", "--max-instances", "1000", "--out", path("o")});
  EXPECT_EQ(r.code, kExitBudget) << r.err;
}

}  // namespace
}  // namespace bcg
