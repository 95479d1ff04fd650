#include "lingrank/synth.h"

#include <cmath>

#include "lingrank/error.h"
#include "lingrank/rng.h"

namespace lingrank::synth {
namespace {

std::vector<double> unit_direction(std::size_t d, Rng& rng) {
  for (;;) {
    std::vector<double> v(d);
    double sq = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      sq += x * x;
    }
    const double len = std::sqrt(sq);
    if (len > 1e-8) {
      for (auto& x : v) x /= len;
      return v;
    }
  }
}

// Unit vector orthogonal to the unit vector x.
std::vector<double> orthogonal_direction(const std::vector<double>& x, Rng& rng) {
  for (;;) {
    auto u = unit_direction(x.size(), rng);
    for (int pass = 0; pass < 2; ++pass) {
      double proj = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) proj += u[i] * x[i];
      for (std::size_t i = 0; i < x.size(); ++i) u[i] -= proj * x[i];
    }
    double sq = 0.0;
    for (const double v : u) sq += v * v;
    const double len = std::sqrt(sq);
    if (len > 1e-6) {
      for (auto& v : u) v /= len;
      return u;
    }
  }
}

template <typename T>
T get_or(const nlohmann::json& obj, const char* key, const T& fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : it->get<T>();
}

template <typename T>
T get_required(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error(where + "missing \"" + key + "\"");
  return it->get<T>();
}

}  // namespace

subspace::EmbeddingMatrix gen_gaussian_cloud(const CloudSpec& spec, std::string lang,
                                             std::uint32_t layer) {
  if (spec.n < 2) throw Error("cloud needs n >= 2");
  if (spec.d < 1 || spec.axis_scales.size() != spec.d) {
    throw Error("cloud needs one axis scale per dimension");
  }
  for (const double s : spec.axis_scales) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error("axis scales must be positive and finite");
  }
  Rng rng(spec.seed);
  subspace::EmbeddingMatrix m{std::move(lang), layer, Matrix(spec.n, spec.d)};
  for (std::size_t i = 0; i < spec.n; ++i) {
    auto row = m.data.row(i);
    for (std::size_t j = 0; j < spec.d; ++j) row[j] = spec.axis_scales[j] * rng.normal();
  }
  return m;
}

embstore::PairBlock gen_pair_block(const PairSpec& spec) {
  if (!(std::abs(spec.target_cos) < 1.0)) throw Error("target_cos must lie strictly inside (-1, 1)");
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) throw Error("noise must be >= 0");
  if (spec.d < 2) throw Error("pair block needs d >= 2 (no orthogonal direction in 1D)");
  if (spec.n < 1) throw Error("pair block needs n >= 1");
  if (spec.layers.empty()) throw Error("pair block needs at least one layer");

  const std::size_t n_layers = spec.layers.size();
  embstore::PairBlock block{
      {spec.id, spec.source_lang, spec.target_lang, static_cast<std::uint32_t>(spec.n)},
      embstore::Tensor3(n_layers, spec.n, spec.d),
      embstore::Tensor3(n_layers, spec.n, spec.d)};

  const double c = spec.target_cos;
  const double s = std::sqrt(1.0 - c * c);
  Rng rng(spec.seed);
  for (std::size_t l = 0; l < n_layers; ++l) {
    for (std::size_t i = 0; i < spec.n; ++i) {
      const auto x = unit_direction(spec.d, rng);
      const auto u = orthogonal_direction(x, rng);
      auto src = block.source.vec(l, i);
      auto tgt = block.target.vec(l, i);
      for (std::size_t j = 0; j < spec.d; ++j) {
        double xs = x[j];
        double yt = c * x[j] + s * u[j];
        if (spec.noise > 0.0) {
          xs += spec.noise * rng.normal();
          yt += spec.noise * rng.normal();
        }
        src[j] = static_cast<float>(xs);
        tgt[j] = static_cast<float>(yt);
      }
    }
  }
  return block;
}

embstore::EmbeddingStore store_from_spec(const nlohmann::json& spec) {
  if (!spec.is_object()) throw Error("synth spec must be a JSON object");
  try {
    const auto dim = get_required<std::size_t>(spec, "dim", "synth spec: ");
    const auto layers = get_required<std::vector<std::uint32_t>>(spec, "layers", "synth spec: ");
    const auto n_default = get_or<std::size_t>(spec, "n_samples", 0);
    const auto seed = get_or<std::uint64_t>(spec, "seed", 0);
    const auto noise = get_or<double>(spec, "noise", 0.0);
    const auto& pairs = spec.at("pairs");
    if (!pairs.is_array() || pairs.empty()) throw Error("synth spec: \"pairs\" must be a non-empty array");

    std::vector<embstore::PairBlock> blocks;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& p = pairs[i];
      const auto where = "synth spec: pairs[" + std::to_string(i) + "]: ";
      PairSpec ps;
      ps.source_lang = get_required<std::string>(p, "source_lang", where);
      ps.target_lang = get_required<std::string>(p, "target_lang", where);
      ps.id = get_or<std::string>(p, "id", ps.source_lang + "-" + ps.target_lang);
      ps.n = get_or<std::size_t>(p, "n_samples", n_default);
      ps.d = dim;
      ps.layers = layers;
      ps.target_cos = get_required<double>(p, "target_cos", where);
      ps.noise = get_or<double>(p, "noise", noise);
      ps.seed = get_or<std::uint64_t>(p, "seed", seed + i);
      try {
        blocks.push_back(gen_pair_block(ps));
      } catch (const Error& e) {
        throw Error(where + e.what());
      }
    }

    auto store = embstore::EmbeddingStore::from_blocks(
        get_or<std::string>(spec, "model", "synthetic"), layers, std::move(blocks));
    store.header.metadata = {{"generator", "lingrank synth"},
                             {"prng", Rng::kAlgorithm},
                             {"seed", seed}};
    return store;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("synth spec: ") + e.what());
  }
}

}  // namespace lingrank::synth
