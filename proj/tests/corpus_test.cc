#include "lingrank/corpus.h"

#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "lingrank/error.h"

namespace lingrank::corpus {
namespace {

const LanguagePair kEnDe{"en", "de"};

ParallelCorpus numbered(std::size_t n) {
  ParallelCorpus c{"en", "de", {}};
  for (std::size_t i = 0; i < n; ++i) {
    c.pairs.push_back({"src " + std::to_string(i), "tgt " + std::to_string(i)});
  }
  return c;
}

TEST(ParseJsonl, GermanEnglishRecordUsesBaselineAsSource) {
  std::istringstream in(
      R"({"German":"Ich wollte dir erst noch etwas zeigen.","English":"I wanted to show you something first."})"
      "\n");
  const auto c = parse_jsonl_corpus(in, "English", "German", kEnDe);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.pairs[0].source_text, "I wanted to show you something first.");
  EXPECT_EQ(c.pairs[0].target_text, "Ich wollte dir erst noch etwas zeigen.");
  EXPECT_EQ(c.source_lang, "en");
  EXPECT_EQ(c.target_lang, "de");
}

TEST(ParseJsonl, EmptyInputGivesEmptyCorpus) {
  std::istringstream in("");
  EXPECT_TRUE(parse_jsonl_corpus(in, "en", "de", kEnDe).empty());
}

TEST(ParseJsonl, PreservesFileOrder) {
  std::istringstream in(R"({"a":"1","b":"x"})"
                        "\n"
                        R"({"a":"2","b":"y"})"
                        "\n"
                        R"({"a":"3","b":"z"})");
  const auto c = parse_jsonl_corpus(in, "a", "b", kEnDe);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.pairs[0].source_text, "1");
  EXPECT_EQ(c.pairs[1].source_text, "2");
  EXPECT_EQ(c.pairs[2].target_text, "z");
}

TEST(ParseJsonl, MalformedLineReportsLineNumber) {
  std::istringstream in(R"({"a":"1","b":"x"})"
                        "\n{not json\n");
  try {
    parse_jsonl_corpus(in, "a", "b", kEnDe);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(ParseJsonl, MissingKeyIsNamed) {
  std::istringstream in(R"({"a":"1"})");
  try {
    parse_jsonl_corpus(in, "a", "German", kEnDe);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("German"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos) << e.what();
  }
}

TEST(ParseJsonl, RejectsWhitespaceOnlyText) {
  std::istringstream in(R"({"a":"   ","b":"x"})");
  EXPECT_THROW(parse_jsonl_corpus(in, "a", "b", kEnDe), Error);
}

TEST(ParseJsonl, RejectsIdenticalLanguages) {
  std::istringstream in("");
  EXPECT_THROW(parse_jsonl_corpus(in, "a", "b", {"en", "en"}), Error);
}

TEST(ParseTsv, FiveRows) {
  std::istringstream in("a\tA\nb\tB\nc\tC\nd\tD\ne\tE\n");
  const auto c = parse_tsv_corpus(in, {}, kEnDe);
  ASSERT_EQ(c.size(), 5u);
  EXPECT_EQ(c.pairs[4].source_text, "e");
  EXPECT_EQ(c.pairs[4].target_text, "E");
}

TEST(ParseTsv, RaggedRowNamesRow) {
  std::istringstream in("a\tA\nb\tB\nc\tC\nd\ne\tE\n");
  try {
    parse_tsv_corpus(in, {}, kEnDe);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("row 4: expected ≥2 columns"), std::string::npos)
        << e.what();
  }
}

TEST(ParseTsv, SkipHeaderDropsFirstRow) {
  std::string text = "en\tde\n";
  for (int i = 0; i < 6; ++i) text += "s" + std::to_string(i) + "\tt" + std::to_string(i) + "\r\n";
  std::istringstream with(text), without(text);
  const auto skipped = parse_tsv_corpus(with, {0, 1, true}, kEnDe);
  const auto kept = parse_tsv_corpus(without, {0, 1, false}, kEnDe);
  EXPECT_EQ(kept.size(), 7u);
  EXPECT_EQ(skipped.size(), kept.size() - 1);
  EXPECT_EQ(skipped.pairs[0].target_text, "t0");  // '\r' stripped
}

TEST(ParseTsv, SelectsColumns) {
  std::istringstream in("id1\tHallo\tHello\n");
  const auto c = parse_tsv_corpus(in, {2, 1, false}, kEnDe);
  EXPECT_EQ(c.pairs[0].source_text, "Hello");
  EXPECT_EQ(c.pairs[0].target_text, "Hallo");
}

TEST(WriteJsonl, RoundTripPreservesCountAndOrder) {
  const auto c = numbered(17);
  std::stringstream buf;
  write_jsonl_corpus(c, buf, "English", "German");
  EXPECT_EQ(parse_jsonl_corpus(buf, "English", "German", kEnDe), c);
}

TEST(Sample, FullSizeIsIdentity) {
  const auto c = numbered(2000);
  EXPECT_EQ(sample_corpus(c, 2000, 1), c);
}

TEST(Sample, OversizedRequestEqualsFullRequest) {
  const auto c = numbered(100);
  EXPECT_EQ(sample_corpus(c, 100, 5), sample_corpus(c, 1000, 5));
  EXPECT_EQ(sample_corpus(c, 1000, 5), c);
}

TEST(Sample, DeterministicUnderSeed) {
  const auto c = numbered(10);
  EXPECT_EQ(sample_corpus(c, 3, 7), sample_corpus(c, 3, 7));
  EXPECT_EQ(sample_corpus(c, 3, 7).size(), 3u);
}

TEST(Sample, ZeroIsAnError) { EXPECT_THROW(sample_corpus(numbered(4), 0, 1), Error); }

TEST(Sample, IsOrderedSubsequenceForManySeeds) {
  const auto c = numbered(50);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = sample_corpus(c, 1 + seed % 49, seed);
    ASSERT_EQ(s.size(), 1 + seed % 49);
    std::size_t j = 0;
    for (const auto& p : c.pairs) {
      if (j < s.size() && s.pairs[j] == p) ++j;
    }
    EXPECT_EQ(j, s.size()) << "seed " << seed;
  }
}

TEST(Sample, RoughlyUniform) {
  // Each of 10 items should be picked about 3/10 of the time.
  const auto c = numbered(10);
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    for (const auto& p : sample_corpus(c, 3, seed).pairs) ++hits[std::stoi(p.source_text.substr(4))];
  }
  for (const int h : hits) EXPECT_NEAR(h, 900, 120);
}

}  // namespace
}  // namespace lingrank::corpus
