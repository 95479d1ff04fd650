#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lingrank/embstore.h"
#include "lingrank/subspace.h"

// Synthetic embeddings with known geometry, used as test oracles and for
// exercising the pipeline without a model. All randomness comes from
// lingrank::Rng, so output is reproducible from the seed.
namespace lingrank::synth {

struct CloudSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> axis_scales;  // standard deviation per coordinate, length d
  std::uint64_t seed = 0;
};

// Rows drawn independently; coordinate j ~ Normal(0, axis_scales[j]^2).
subspace::EmbeddingMatrix gen_gaussian_cloud(const CloudSpec& spec, std::string lang = {},
                                             std::uint32_t layer = 0);

struct PairSpec {
  std::string id;
  std::string source_lang;
  std::string target_lang;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::uint32_t> layers;
  double target_cos = 0.0;  // strictly inside (-1, 1)
  double noise = 0.0;       // per-coordinate standard deviation added to both sides
  std::uint64_t seed = 0;
};

// Per sample and per layer: source x is a uniform unit direction; target
// y = cos(t) x + sin(t) u with u a unit vector orthogonal to x and
// t = arccos(target_cos). With noise > 0, independent Normal(0, noise^2)
// perturbations are then added to every coordinate of x and y.
embstore::PairBlock gen_pair_block(const PairSpec& spec);

// Builds a whole store from a JSON description:
//   {"model": "synthetic", "dim": 64, "layers": [5, 10], "n_samples": 1000,
//    "seed": 1, "noise": 0.01,
//    "pairs": [{"id": "en-de", "source_lang": "en", "target_lang": "de",
//               "target_cos": 0.8}, ...]}
// Pairs may override "n_samples", "noise" and "seed"; the default seed of
// pair i is seed + i.
embstore::EmbeddingStore store_from_spec(const nlohmann::json& spec);

}  // namespace lingrank::synth
