#include "lingrank/simcore.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "lingrank/error.h"

namespace lingrank::simcore {
namespace {

// Neumaier-compensated running sum; keeps means stable under reordering.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct DotNorms {
  double dot = 0.0;
  double xx = 0.0;
  double yy = 0.0;
};

template <typename T>
DotNorms dot_norms(std::span<const T> x, std::span<const T> y) {
  if (x.size() != y.size()) {
    throw Error("vector length mismatch: " + std::to_string(x.size()) + " vs " +
                std::to_string(y.size()));
  }
  DotNorms r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i];
    const double b = y[i];
    r.dot += a * b;
    r.xx += a * a;
    r.yy += b * b;
  }
  return r;
}

double finish(const DotNorms& r) {
  const double c = r.dot / (std::sqrt(r.xx) * std::sqrt(r.yy));
  return std::clamp(c, -1.0, 1.0);
}

template <typename T>
double cosine_impl(std::span<const T> x, std::span<const T> y) {
  const auto r = dot_norms(x, y);
  if (!(r.xx > 0.0) || !(r.yy > 0.0)) throw Error("degenerate vector (zero norm)");
  return finish(r);
}

std::string join(std::span<const std::uint32_t> layers) {
  std::string s;
  for (const auto l : layers) s += (s.empty() ? "" : ", ") + std::to_string(l);
  return s;
}

std::size_t position_or_throw(std::span<const std::uint32_t> layers, std::uint32_t layer) {
  const auto it = std::find(layers.begin(), layers.end(), layer);
  if (it == layers.end()) {
    throw Error("layer " + std::to_string(layer) + " not in store (available: " + join(layers) +
                ")");
  }
  return static_cast<std::size_t>(it - layers.begin());
}

}  // namespace

double cosine(std::span<const double> x, std::span<const double> y) { return cosine_impl(x, y); }
double cosine(std::span<const float> x, std::span<const float> y) { return cosine_impl(x, y); }

LayerSimilarity pair_layer_similarity(const embstore::PairBlock& block,
                                      std::span<const std::uint32_t> layers, std::uint32_t layer) {
  const std::size_t pos = position_or_throw(layers, layer);
  if (pos >= block.source.layers() || pos >= block.target.layers() ||
      block.source.samples() != block.target.samples()) {
    throw Error("pair block shape does not match store layers");
  }

  LayerSimilarity out{layer, 0.0, 0, 0};
  CompensatedSum sum;
  for (std::size_t i = 0; i < block.source.samples(); ++i) {
    const auto r = dot_norms(block.source.vec(pos, i), block.target.vec(pos, i));
    if (std::sqrt(r.xx) <= embstore::kZeroNorm || std::sqrt(r.yy) <= embstore::kZeroNorm) {
      ++out.n_skipped;
      continue;
    }
    sum.add(finish(r));
    ++out.n_used;
  }
  if (out.n_used == 0) {
    throw Error("layer " + std::to_string(layer) + ": all " + std::to_string(out.n_skipped) +
                " samples have a zero-norm vector");
  }
  out.mean_cos = std::clamp(sum.value() / static_cast<double>(out.n_used), -1.0, 1.0);
  return out;
}

SimilarityProfile aggregate_similarity(const embstore::PairBlock& block,
                                       std::span<const std::uint32_t> layers,
                                       std::span<const std::uint32_t> subset) {
  if (subset.empty()) throw Error("layer subset is empty");
  std::set<std::uint32_t> seen;
  for (const auto l : subset) {
    if (!seen.insert(l).second) throw Error("layer " + std::to_string(l) + " repeated in subset");
    position_or_throw(layers, l);
  }

  SimilarityProfile profile;
  profile.pair_id = block.meta.id;
  profile.source_lang = block.meta.source_lang;
  profile.target_lang = block.meta.target_lang;
  profile.subset.assign(subset.begin(), subset.end());
  for (const auto l : layers) profile.per_layer.push_back(pair_layer_similarity(block, layers, l));

  CompensatedSum sum;
  for (const auto l : subset) sum.add(profile.per_layer[position_or_throw(layers, l)].mean_cos);
  profile.aggregate = sum.value() / static_cast<double>(subset.size());
  return profile;
}

std::vector<std::uint32_t> resolve_subset(
    std::span<const std::uint32_t> store_layers,
    const std::optional<std::vector<std::uint32_t>>& requested) {
  if (requested) return *requested;
  for (const auto l : kDefaultSubset) {
    if (std::find(store_layers.begin(), store_layers.end(), l) == store_layers.end()) {
      throw Error("store layers (" + join(store_layers) + ") lack default subset layer " +
                  std::to_string(l) + "; pass an explicit subset");
    }
  }
  return {std::begin(kDefaultSubset), std::end(kDefaultSubset)};
}

std::vector<SimilarityProfile> similarity_curves(const embstore::EmbeddingStore& store,
                                                 std::span<const std::uint32_t> subset) {
  if (store.blocks.empty()) throw Error("store has no pair blocks");
  std::vector<SimilarityProfile> out;
  out.reserve(store.blocks.size());
  for (const auto& block : store.blocks) {
    try {
      out.push_back(aggregate_similarity(block, store.header.layers, subset));
    } catch (const Error& e) {
      throw Error("pair " + block.meta.id + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lingrank::simcore
