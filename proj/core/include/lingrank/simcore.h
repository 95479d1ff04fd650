#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lingrank/embstore.h"

namespace lingrank::simcore {

// Intermediate layers averaged into the aggregate score by default.
inline constexpr std::uint32_t kDefaultSubset[] = {5, 10, 15, 20, 25};

// Mean cosine between the two sides of one pair block at one layer.
struct LayerSimilarity {
  std::uint32_t layer = 0;
  double mean_cos = 0.0;
  std::size_t n_used = 0;
  std::size_t n_skipped = 0;  // samples with a zero-norm vector on either side

  friend bool operator==(const LayerSimilarity&, const LayerSimilarity&) = default;
};

struct SimilarityProfile {
  std::string pair_id;
  std::string source_lang;
  std::string target_lang;
  std::vector<LayerSimilarity> per_layer;  // every store layer, ascending
  std::vector<std::uint32_t> subset;
  double aggregate = 0.0;  // unweighted mean of mean_cos over `subset`

  friend bool operator==(const SimilarityProfile&, const SimilarityProfile&) = default;
};

// x.y / (|x| |y|), accumulated in double and clamped to [-1, 1]. Throws on
// length mismatch or a zero-norm input ("degenerate vector").
double cosine(std::span<const double> x, std::span<const double> y);
double cosine(std::span<const float> x, std::span<const float> y);

// `layers` are the store's layer indices, in tensor order.
LayerSimilarity pair_layer_similarity(const embstore::PairBlock& block,
                                      std::span<const std::uint32_t> layers, std::uint32_t layer);

SimilarityProfile aggregate_similarity(const embstore::PairBlock& block,
                                       std::span<const std::uint32_t> layers,
                                       std::span<const std::uint32_t> subset);

// Picks the layer subset for a store: `requested` if given, otherwise the
// default subset, which every store layer set must then contain.
std::vector<std::uint32_t> resolve_subset(std::span<const std::uint32_t> store_layers,
                                          const std::optional<std::vector<std::uint32_t>>& requested);

// One profile per pair block, in header order.
std::vector<SimilarityProfile> similarity_curves(const embstore::EmbeddingStore& store,
                                                 std::span<const std::uint32_t> subset);

}  // namespace lingrank::simcore
