#include "lingrank/embstore.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lingrank/error.h"

namespace lingrank::embstore {
namespace {

PairBlock filled_block(std::string id, std::size_t layers, std::size_t n, std::size_t d,
                       float offset = 0.0f) {
  PairBlock b{{std::move(id), "en", "xx", static_cast<std::uint32_t>(n)},
              Tensor3(layers, n, d),
              Tensor3(layers, n, d)};
  int k = 0;
  for (auto* side : {&b.source, &b.target}) {
    for (auto& x : side->values()) x = offset - 1.0f + 0.25f * static_cast<float>((k++ * 7) % 13);
  }
  return b;
}

EmbeddingStore small_store() {
  return EmbeddingStore::from_blocks("tiny", {5, 10}, {filled_block("en-xx", 2, 3, 4)});
}

std::string serialize(const EmbeddingStore& s) {
  std::ostringstream out(std::ios::binary);
  write_store(s, out);
  return out.str();
}

std::uint32_t header_len(const std::string& bytes) {
  return static_cast<unsigned char>(bytes[4]) | (static_cast<unsigned char>(bytes[5]) << 8) |
         (static_cast<unsigned char>(bytes[6]) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[7])) << 24);
}

TEST(WriteStore, PayloadSizeArithmetic) {
  const auto bytes = serialize(small_store());
  ASSERT_EQ(bytes.substr(0, 4), "LRE1");
  // 2 sides x 2 layers x 3 samples x 4 dims x 4 bytes
  EXPECT_EQ(bytes.size() - 8 - header_len(bytes), 192u);
  EXPECT_EQ(payload_bytes(small_store().header), 192u);
}

TEST(WriteStore, RoundTripIsExact) {
  auto store = small_store();
  store.header.metadata = {{"prompt_format", "raw"}, {"truncated", 3}};
  const auto bytes = serialize(store);
  std::istringstream in(bytes, std::ios::binary);
  const auto back = read_store(in);
  EXPECT_EQ(back, store);
  EXPECT_EQ(serialize(back), bytes);
}

TEST(WriteStore, DuplicatePairIdFailsBeforeWriting) {
  auto store = EmbeddingStore::from_blocks(
      "tiny", {1}, {filled_block("dup", 1, 2, 2), filled_block("dup", 1, 2, 2)});
  std::ostringstream out;
  EXPECT_THROW(write_store(store, out), Error);
  EXPECT_TRUE(out.str().empty());

  const auto path = std::filesystem::temp_directory_path() / "lingrank_dup.lre1";
  std::filesystem::remove(path);
  EXPECT_THROW(write_store(store, path), Error);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(WriteStore, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "lingrank_rt.lre1";
  const auto store = small_store();
  write_store(store, path);
  EXPECT_EQ(read_store(path), store);
  EXPECT_EQ(std::filesystem::file_size(path), serialize(store).size());
  std::filesystem::remove(path);
}

TEST(ReadStore, BadMagic) {
  auto bytes = serialize(small_store());
  bytes.replace(0, 4, "XXXX");
  std::istringstream in(bytes);
  try {
    read_store(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "not an LRE1 store");
  }
}

TEST(ReadStore, TruncatedPayloadNamesBothLengths) {
  auto bytes = serialize(small_store());
  bytes.pop_back();
  std::istringstream in(bytes);
  try {
    read_store(in);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("expected 192"), std::string::npos) << msg;
    EXPECT_NE(msg.find("got 191"), std::string::npos) << msg;
  }
}

TEST(ReadStore, TrailingBytesRejected) {
  auto bytes = serialize(small_store());
  bytes.push_back('\0');
  std::istringstream in(bytes);
  EXPECT_THROW(read_store(in), Error);
}

TEST(ReadStore, InvalidHeaderJson) {
  std::string bytes = "LRE1";
  const std::string header = "{not json";
  bytes += static_cast<char>(header.size());
  bytes += std::string(3, '\0');
  bytes += header;
  std::istringstream in(bytes);
  try {
    read_store(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("invalid header JSON"), std::string::npos);
  }
}

TEST(ReadStore, UnknownVersionRefused) {
  auto bytes = serialize(small_store());
  const auto pos = bytes.find("\"version\":1");
  ASSERT_NE(pos, std::string::npos);
  bytes[pos + 10] = '7';
  std::istringstream in(bytes);
  try {
    read_store(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("version 7"), std::string::npos) << e.what();
  }
}

// Fixture written by tests/data/make_fixture.py with Python's struct module.
TEST(ReadStore, LittleEndianFixtureValueByValue) {
  const auto store = read_store(std::filesystem::path(LINGRANK_TEST_DATA_DIR) / "fixture_le.lre1");
  EXPECT_EQ(store.header.model, "fixture-model");
  EXPECT_EQ(store.header.dim, 3u);
  EXPECT_EQ(store.header.layers, (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(store.header.metadata.at("token_position"), "last_non_padding");
  ASSERT_EQ(store.blocks.size(), 1u);
  const auto& b = store.blocks[0];
  EXPECT_EQ(b.meta, (PairMeta{"en-xx", "en", "xx", 2}));
  for (int s = 0; s < 2; ++s) {
    const auto& side = s == 0 ? b.source : b.target;
    for (std::size_t l = 0; l < 2; ++l) {
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          float expected = static_cast<float>(s * 100 + l * 10 + i) + static_cast<float>(j) / 4.0f;
          if (i % 2) expected = -expected;
          EXPECT_EQ(side.vec(l, i)[j], expected) << s << l << i << j;
        }
      }
    }
  }
  EXPECT_TRUE(validate_store(store).empty());
}

TEST(ValidateStore, WellFormedHasNoViolations) { EXPECT_TRUE(validate_store(small_store()).empty()); }

TEST(ValidateStore, LayersNotStrictlyIncreasing) {
  auto store = EmbeddingStore::from_blocks("m", {5, 5, 10}, {filled_block("p", 3, 2, 2)});
  const auto v = validate_store(store);
  ASSERT_FALSE(v.empty());
  EXPECT_NE(std::find(v.begin(), v.end(), "layers not strictly increasing"), v.end());
}

TEST(ValidateStore, ZeroNormFractionNamesSlab) {
  auto block = filled_block("en-xx", 1, 100, 4);
  for (std::size_t i = 0; i < 15; ++i) {
    for (auto& x : block.target.vec(0, i * 6)) x = 0.0f;
  }
  const auto store = EmbeddingStore::from_blocks("m", {7}, {block});
  const auto v = validate_store(store);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("pair en-xx"), std::string::npos) << v[0];
  EXPECT_NE(v[0].find("side target"), std::string::npos) << v[0];
  EXPECT_NE(v[0].find("layer 7"), std::string::npos) << v[0];
  EXPECT_NE(v[0].find("15%"), std::string::npos) << v[0];
  EXPECT_TRUE(validate_store(store, 0.2).empty());
}

TEST(ValidateStore, ShapeMismatchReported) {
  auto store = small_store();
  store.header.dim = 5;
  EXPECT_FALSE(validate_store(store).empty());
}

TEST(ValidateStore, BlockHeaderMismatchReported) {
  auto store = small_store();
  store.header.pairs[0].id = "other";
  EXPECT_FALSE(validate_store(store).empty());
}

TEST(ValidateStore, NonFiniteValuesReported) {
  auto store = small_store();
  store.blocks[0].source.values()[3] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_FALSE(validate_store(store).empty());
}

}  // namespace
}  // namespace lingrank::embstore
