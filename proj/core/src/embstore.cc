#include "lingrank/embstore.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "lingrank/error.h"

namespace lingrank::embstore {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

nlohmann::json header_to_json(const StoreHeader& h) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : h.pairs) {
    pairs.push_back({{"id", p.id},
                     {"source_lang", p.source_lang},
                     {"target_lang", p.target_lang},
                     {"n_samples", p.n_samples}});
  }
  return {{"version", h.version}, {"model", h.model},   {"dim", h.dim},
          {"dtype", h.dtype},     {"layers", h.layers}, {"pairs", pairs},
          {"metadata", h.metadata}};
}

template <typename T>
T required(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error("invalid header JSON: " + where + "missing \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error("invalid header JSON: " + where + "bad type for \"" + key + "\"");
  }
}

StoreHeader header_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("invalid header JSON: not an object");
  StoreHeader h;
  h.version = required<std::uint32_t>(j, "version", "");
  if (h.version != kFormatVersion) {
    throw Error("unsupported LRE1 version " + std::to_string(h.version) + " (expected " +
                std::to_string(kFormatVersion) + ")");
  }
  h.model = required<std::string>(j, "model", "");
  h.dim = required<std::uint32_t>(j, "dim", "");
  h.dtype = required<std::string>(j, "dtype", "");
  if (h.dtype != "f32") throw Error("unsupported dtype \"" + h.dtype + "\" (expected f32)");
  h.layers = required<std::vector<std::uint32_t>>(j, "layers", "");
  const auto pairs = required<nlohmann::json>(j, "pairs", "");
  if (!pairs.is_array()) throw Error("invalid header JSON: \"pairs\" is not an array");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto where = "pairs[" + std::to_string(i) + "]: ";
    const auto& p = pairs[i];
    if (!p.is_object()) throw Error("invalid header JSON: " + where + "not an object");
    h.pairs.push_back({required<std::string>(p, "id", where),
                       required<std::string>(p, "source_lang", where),
                       required<std::string>(p, "target_lang", where),
                       required<std::uint32_t>(p, "n_samples", where)});
  }
  if (const auto it = j.find("metadata"); it != j.end()) h.metadata = *it;
  return h;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g%%", fraction * 100.0);
  return buf;
}

}  // namespace

std::optional<std::size_t> StoreHeader::layer_position(std::uint32_t layer) const {
  const auto it = std::find(layers.begin(), layers.end(), layer);
  if (it == layers.end()) return std::nullopt;
  return static_cast<std::size_t>(it - layers.begin());
}

EmbeddingStore EmbeddingStore::from_blocks(std::string model, std::vector<std::uint32_t> layers,
                                           std::vector<PairBlock> blocks) {
  EmbeddingStore store;
  store.header.model = std::move(model);
  store.header.layers = std::move(layers);
  if (!blocks.empty()) store.header.dim = static_cast<std::uint32_t>(blocks.front().source.dim());
  for (const auto& b : blocks) store.header.pairs.push_back(b.meta);
  store.blocks = std::move(blocks);
  return store;
}

const PairBlock* EmbeddingStore::find(const std::string& pair_id) const {
  for (const auto& b : blocks) {
    if (b.meta.id == pair_id) return &b;
  }
  return nullptr;
}

std::uint64_t payload_bytes(const StoreHeader& header) {
  std::uint64_t total = 0;
  for (const auto& p : header.pairs) {
    total += 2ull * header.layers.size() * p.n_samples * header.dim * sizeof(float);
  }
  return total;
}

std::vector<std::string> validate_store(const EmbeddingStore& store, double max_zero_fraction) {
  std::vector<std::string> out;
  const auto& h = store.header;
  if (h.version != kFormatVersion) out.push_back("unsupported version " + std::to_string(h.version));
  if (h.dtype != "f32") out.push_back("dtype must be f32, got \"" + h.dtype + "\"");
  if (h.dim < 1) out.push_back("dim must be at least 1");
  if (h.layers.empty()) out.push_back("no layers");
  if (std::adjacent_find(h.layers.begin(), h.layers.end(), std::greater_equal<>()) !=
      h.layers.end()) {
    out.push_back("layers not strictly increasing");
  }

  std::set<std::string> ids;
  for (const auto& p : h.pairs) {
    if (!ids.insert(p.id).second) out.push_back("duplicate pair id \"" + p.id + "\"");
    if (p.n_samples < 1) out.push_back("pair " + p.id + ": n_samples must be at least 1");
  }
  if (store.blocks.size() != h.pairs.size()) {
    out.push_back("header lists " + std::to_string(h.pairs.size()) + " pairs but store has " +
                  std::to_string(store.blocks.size()) + " blocks");
    return out;
  }

  for (std::size_t b = 0; b < store.blocks.size(); ++b) {
    const auto& block = store.blocks[b];
    const auto& meta = h.pairs[b];
    if (!(block.meta == meta)) {
      out.push_back("block " + std::to_string(b) + " (" + block.meta.id +
                    ") does not match header pair " + meta.id);
      continue;
    }
    bool shapes_ok = true;
    for (const auto* side : {&block.source, &block.target}) {
      const char* side_name = side == &block.source ? "source" : "target";
      if (side->layers() != h.layers.size() || side->samples() != meta.n_samples ||
          side->dim() != h.dim) {
        out.push_back("pair " + meta.id + " side " + side_name + ": tensor shape [" +
                      std::to_string(side->layers()) + "x" + std::to_string(side->samples()) +
                      "x" + std::to_string(side->dim()) + "] does not match header [" +
                      std::to_string(h.layers.size()) + "x" + std::to_string(meta.n_samples) +
                      "x" + std::to_string(h.dim) + "]");
        shapes_ok = false;
      }
    }
    if (!shapes_ok) continue;

    for (const auto* side : {&block.source, &block.target}) {
      const char* side_name = side == &block.source ? "source" : "target";
      for (std::size_t l = 0; l < h.layers.size(); ++l) {
        std::size_t zero = 0;
        bool finite = true;
        for (std::size_t i = 0; i < meta.n_samples; ++i) {
          double sq = 0.0;
          for (const float v : side->vec(l, i)) {
            finite = finite && std::isfinite(v);
            sq += static_cast<double>(v) * v;
          }
          if (std::sqrt(sq) <= kZeroNorm) ++zero;
        }
        const auto slab = "pair " + meta.id + " side " + side_name + " layer " +
                          std::to_string(h.layers[l]);
        if (!finite) out.push_back(slab + ": non-finite values");
        const double fraction = meta.n_samples ? static_cast<double>(zero) / meta.n_samples : 0.0;
        if (fraction > max_zero_fraction) {
          out.push_back(slab + ": " + std::to_string(zero) + " of " +
                        std::to_string(meta.n_samples) + " vectors (" + format_percent(fraction) +
                        ") have zero norm");
        }
      }
    }
  }
  return out;
}

void write_store(const EmbeddingStore& store, std::ostream& out) {
  if (const auto violations = validate_store(store); !violations.empty()) {
    std::string msg = "refusing to write invalid store:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw Error(msg);
  }
  const std::string header = header_to_json(store.header).dump();
  std::string prefix(kMagic, sizeof kMagic);
  put_u32(prefix, static_cast<std::uint32_t>(header.size()));
  out.write(prefix.data(), static_cast<std::streamsize>(prefix.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::string buf;
  for (const auto& block : store.blocks) {
    for (const auto* side : {&block.source, &block.target}) {
      const auto values = side->values();
      buf.clear();
      buf.reserve(values.size() * 4);
      for (const float v : values) put_u32(buf, std::bit_cast<std::uint32_t>(v));
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
  }
  if (!out) throw Error("write failed");
}

void write_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  if (const auto violations = validate_store(store); !violations.empty()) {
    std::string msg = "refusing to write invalid store:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw Error(msg);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    write_store(store, out);
    out.close();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

EmbeddingStore read_store(std::istream& in) {
  unsigned char prefix[8];
  in.read(reinterpret_cast<char*>(prefix), sizeof prefix);
  if (in.gcount() < 4 || std::memcmp(prefix, kMagic, 4) != 0) throw Error("not an LRE1 store");
  if (in.gcount() < 8) throw Error("truncated LRE1 header");
  const std::uint32_t header_len = get_u32(prefix + 4);

  std::string header_text(header_len, '\0');
  in.read(header_text.data(), header_len);
  if (static_cast<std::uint64_t>(in.gcount()) != header_len) {
    throw Error("truncated header: expected " + std::to_string(header_len) + " bytes, got " +
                std::to_string(in.gcount()));
  }
  nlohmann::json header_json;
  try {
    header_json = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("invalid header JSON: ") + e.what());
  }

  EmbeddingStore store;
  store.header = header_from_json(header_json);
  const auto& h = store.header;

  const std::string payload{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const std::uint64_t expected = payload_bytes(h);
  if (payload.size() < expected) {
    throw Error("truncated payload: expected " + std::to_string(expected) + " bytes, got " +
                std::to_string(payload.size()));
  }
  if (payload.size() > expected) {
    throw Error("trailing bytes after payload: expected " + std::to_string(expected) +
                " bytes, got " + std::to_string(payload.size()));
  }

  const auto* cursor = reinterpret_cast<const unsigned char*>(payload.data());
  for (const auto& meta : h.pairs) {
    PairBlock block{meta, Tensor3(h.layers.size(), meta.n_samples, h.dim),
                    Tensor3(h.layers.size(), meta.n_samples, h.dim)};
    for (auto* side : {&block.source, &block.target}) {
      for (float& v : side->values()) {
        v = std::bit_cast<float>(get_u32(cursor));
        cursor += 4;
      }
    }
    store.blocks.push_back(std::move(block));
  }
  return store;
}

EmbeddingStore read_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open store " + path.string());
  return read_store(in);
}

}  // namespace lingrank::embstore
