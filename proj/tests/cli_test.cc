#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace lingrank::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lingrank_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(path("spec.json")) << R"({
      "model": "synthetic", "dim": 32, "layers": [5, 10, 15, 20, 25], "n_samples": 200,
      "seed": 7, "noise": 0.01,
      "pairs": [{"source_lang": "en", "target_lang": "de", "target_cos": 0.8},
                {"source_lang": "en", "target_lang": "cy", "target_cos": 0.5},
                {"source_lang": "en", "target_lang": "kn", "target_cos": 0.2}]
    })";
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void synth() {
    const auto r = call({"synth", path("spec.json"), "-o", path("store.lre1")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }

  fs::path dir_;
};

TEST_F(CliTest, ValidateFixture) {
  const auto r = call({"validate", std::string(LINGRANK_TEST_DATA_DIR) + "/fixture_le.lre1"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "OK\n");
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
  synth();
  const auto r = call({"sim", path("store.lre1"), "-o", path("x.csv"), "--bogus"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, MissingSubcommandIsUsageError) { EXPECT_EQ(call({}).code, kExitUsage); }

TEST_F(CliTest, MissingLayerIsDataError) {
  synth();
  const auto r = call({"sim", path("store.lre1"), "--subset", "7", "-o", path("x.csv")});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("layer 7"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(CliTest, SimRankPipelinePreservesOrder) {
  synth();
  auto r = call({"sim", path("store.lre1"), "-o", path("sim.csv"), "--curves", path("curves.csv"),
                 "--markdown", path("sim.md")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = call({"rank", path("sim.csv"), "-o", path("rank.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ranking = slurp(path("rank.csv"));
  EXPECT_LT(ranking.find(",de,"), ranking.find(",cy,"));
  EXPECT_LT(ranking.find(",cy,"), ranking.find(",kn,"));
  EXPECT_TRUE(fs::exists(path("curves.csv")));
  EXPECT_NE(slurp(path("sim.md")).find("| en-de |"), std::string::npos);

  // Same input, same bytes.
  ASSERT_EQ(call({"sim", path("store.lre1"), "-o", path("sim2.csv")}).code, kExitOk);
  EXPECT_EQ(slurp(path("sim.csv")), slurp(path("sim2.csv")));
}

TEST_F(CliTest, CorrOfIdenticalRankingsIsOne) {
  synth();
  ASSERT_EQ(call({"sim", path("store.lre1"), "-o", path("sim.csv")}).code, kExitOk);
  ASSERT_EQ(call({"rank", path("sim.csv"), "-o", path("rank.csv")}).code, kExitOk);
  const auto r = call({"corr", path("rank.csv"), path("rank.csv"), "--names", "a,b"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "model,a,b\na,1,1\nb,1,1\n");
}

TEST_F(CliTest, JoinWithExternalScalars) {
  synth();
  ASSERT_EQ(call({"sim", path("store.lre1"), "-o", path("sim.csv")}).code, kExitOk);
  std::ofstream(path("ext.csv")) << "lang,resource\nde,3\ncy,2\nkn,1\nfr,9\n";
  const auto r = call({"join", path("sim.csv"), path("ext.csv"), "--method", "spearman"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out,
            "external,method,coefficient,n,languages_used,excluded\n"
            "resource,spearman,1,3,cy;de;kn,fr\n");
}

TEST_F(CliTest, SubspaceWritesStatsAndProjection) {
  synth();
  ASSERT_EQ(call({"sim", path("store.lre1"), "-o", path("sim.csv")}).code, kExitOk);
  const auto r = call({"subspace", path("store.lre1"), "-o", path("sub.csv"), "--proj",
                       path("proj.csv"), "--sim", path("sim.csv"), "--k", "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto stats = slurp(path("sub.csv"));
  EXPECT_EQ(stats.substr(0, stats.find('\n')),
            "lang,layer,side,k,normalized,n_samples,dim,double_variance,similarity,"
            "lambda_1,lambda_2,lambda_3,lambda_4");
  EXPECT_LT(stats.find("\nde,25,target"), stats.find("\nkn,25,target"));
  EXPECT_TRUE(fs::exists(path("proj.csv")));
  EXPECT_EQ(call({"subspace", path("store.lre1"), "-o", path("s.csv"), "--side", "middle"}).code,
            kExitUsage);
}

TEST_F(CliTest, SampleJsonlCorpus) {
  std::ofstream(path("c.jsonl")) << R"({"en": "one", "de": "eins"})" "\n"
                                 << R"({"en": "two", "de": "zwei"})" "\n"
                                 << R"({"en": "three", "de": "drei"})" "\n";
  const auto r = call({"sample", path("c.jsonl"), "--format", "jsonl", "--source-lang", "en",
                       "--target-lang", "de", "-n", "2", "--seed", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
  EXPECT_EQ(call({"sample", path("c.jsonl"), "--format", "jsonl", "--source-lang", "en",
                  "--target-lang", "fr", "-n", "2"})
                .code,
            kExitData);
}

}  // namespace
}  // namespace lingrank::cli
