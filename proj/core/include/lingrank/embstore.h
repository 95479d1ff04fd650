#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// LRE1: single-file container for per-layer last-token embeddings.
//
//   bytes 0..3      ASCII "LRE1"
//   bytes 4..7      u32 little-endian, header length L
//   bytes 8..8+L    UTF-8 JSON header
//   payload         for each pair (header order), for side in (source, target),
//                   for each layer (header order): n_samples rows of dim
//                   little-endian IEEE-754 f32, row-major, no padding.
//
// Header JSON:
//   {"version": 1, "model": "...", "dim": D, "dtype": "f32",
//    "layers": [5, 10, ...],
//    "pairs": [{"id": "en-de", "source_lang": "en", "target_lang": "de",
//               "n_samples": N}, ...],
//    "metadata": {...}}          // optional, free-form
//
// Layer indices are post-block indices: layer l holds the output of
// transformer block l, counting blocks from 1.
namespace lingrank::embstore {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr char kMagic[4] = {'L', 'R', 'E', '1'};
inline constexpr double kDefaultMaxZeroFraction = 0.10;
// Vectors with Euclidean norm at or below this are treated as zero.
inline constexpr double kZeroNorm = 1e-12;

struct PairMeta {
  std::string id;
  std::string source_lang;
  std::string target_lang;
  std::uint32_t n_samples = 0;

  friend bool operator==(const PairMeta&, const PairMeta&) = default;
};

struct StoreHeader {
  std::uint32_t version = kFormatVersion;
  std::string model;
  std::uint32_t dim = 0;
  std::string dtype = "f32";
  std::vector<std::uint32_t> layers;
  std::vector<PairMeta> pairs;
  nlohmann::json metadata = nlohmann::json::object();

  // Position of `layer` in `layers`, if present.
  std::optional<std::size_t> layer_position(std::uint32_t layer) const;

  friend bool operator==(const StoreHeader&, const StoreHeader&) = default;
};

// [n_layers x n_samples x dim] block of f32 values.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t layers, std::size_t samples, std::size_t dim)
      : layers_(layers), samples_(samples), dim_(dim), data_(layers * samples * dim, 0.0f) {}

  std::size_t layers() const { return layers_; }
  std::size_t samples() const { return samples_; }
  std::size_t dim() const { return dim_; }

  std::span<float> vec(std::size_t layer_pos, std::size_t sample) {
    return {data_.data() + (layer_pos * samples_ + sample) * dim_, dim_};
  }
  std::span<const float> vec(std::size_t layer_pos, std::size_t sample) const {
    return {data_.data() + (layer_pos * samples_ + sample) * dim_, dim_};
  }

  std::span<const float> values() const { return data_; }
  std::span<float> values() { return data_; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t layers_ = 0;
  std::size_t samples_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

// Sample i on both sides refers to the same sentence pair i.
struct PairBlock {
  PairMeta meta;
  Tensor3 source;
  Tensor3 target;

  friend bool operator==(const PairBlock&, const PairBlock&) = default;
};

struct EmbeddingStore {
  StoreHeader header;
  std::vector<PairBlock> blocks;  // same order as header.pairs

  // Builds a store whose header pair list mirrors `blocks`.
  static EmbeddingStore from_blocks(std::string model, std::vector<std::uint32_t> layers,
                                    std::vector<PairBlock> blocks);

  const PairBlock* find(const std::string& pair_id) const;

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;
};

// Exact payload size in bytes implied by a header.
std::uint64_t payload_bytes(const StoreHeader& header);

// Returns human-readable violations; empty iff the store is well formed.
// A (pair, side, layer) slab fails when more than `max_zero_fraction` of its
// vectors have zero norm.
std::vector<std::string> validate_store(const EmbeddingStore& store,
                                        double max_zero_fraction = kDefaultMaxZeroFraction);

// Both throw lingrank::Error if the store does not validate; nothing is
// written in that case.
void write_store(const EmbeddingStore& store, std::ostream& out);
void write_store(const EmbeddingStore& store, const std::filesystem::path& path);

EmbeddingStore read_store(std::istream& in);
EmbeddingStore read_store(const std::filesystem::path& path);

}  // namespace lingrank::embstore
