#include "lingrank/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lingrank/error.h"
#include "lingrank/rng.h"

namespace lingrank::corpus {
namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

void check_langs(const LanguagePair& langs) {
  if (langs.source.empty() || langs.target.empty()) {
    throw Error("language codes must be non-empty");
  }
  if (langs.source == langs.target) {
    throw Error("source and target language are both '" + langs.source + "'");
  }
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

ParallelCorpus parse_jsonl_corpus(std::istream& in, const std::string& source_key,
                                  const std::string& target_key, const LanguagePair& langs) {
  check_langs(langs);
  ParallelCorpus corpus{langs.source, langs.target, {}};
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    strip_cr(line);
    if (is_blank(line)) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(where + "malformed JSON (" + e.what() + ")");
    }
    if (!record.is_object()) throw Error(where + "expected a JSON object");

    auto field = [&](const std::string& key) {
      const auto it = record.find(key);
      if (it == record.end()) throw Error(where + "missing key \"" + key + "\"");
      if (!it->is_string()) throw Error(where + "value of \"" + key + "\" is not a string");
      auto text = it->get<std::string>();
      if (is_blank(text)) throw Error(where + "empty text for \"" + key + "\"");
      return text;
    };
    corpus.pairs.push_back({field(source_key), field(target_key)});
  }
  return corpus;
}

ParallelCorpus parse_jsonl_corpus(const std::filesystem::path& path,
                                  const std::string& source_key,
                                  const std::string& target_key, const LanguagePair& langs) {
  auto in = open(path);
  return parse_jsonl_corpus(in, source_key, target_key, langs);
}

ParallelCorpus parse_tsv_corpus(std::istream& in, const TsvOptions& options,
                                const LanguagePair& langs) {
  check_langs(langs);
  if (options.source_col == options.target_col) {
    throw Error("source and target column are both " + std::to_string(options.source_col));
  }
  const std::size_t needed = std::max(options.source_col, options.target_col) + 1;

  ParallelCorpus corpus{langs.source, langs.target, {}};
  std::string line;
  bool header_pending = options.skip_header;
  for (std::size_t row_no = 1; std::getline(in, line); ++row_no) {
    strip_cr(line);
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<std::string_view> cols;
    std::string_view rest = line;
    for (;;) {
      const auto tab = rest.find('\t');
      cols.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    const auto where = "row " + std::to_string(row_no) + ": ";
    if (cols.size() < needed) {
      throw Error(where + "expected ≥" + std::to_string(needed) + " columns, got " +
                  std::to_string(cols.size()));
    }
    const auto source = cols[options.source_col];
    const auto target = cols[options.target_col];
    if (is_blank(source) || is_blank(target)) throw Error(where + "empty text");
    corpus.pairs.push_back({std::string(source), std::string(target)});
  }
  return corpus;
}

ParallelCorpus parse_tsv_corpus(const std::filesystem::path& path, const TsvOptions& options,
                                const LanguagePair& langs) {
  auto in = open(path);
  return parse_tsv_corpus(in, options, langs);
}

void write_jsonl_corpus(const ParallelCorpus& corpus, std::ostream& out,
                        const std::string& source_key, const std::string& target_key) {
  for (const auto& pair : corpus.pairs) {
    nlohmann::ordered_json record;
    record[source_key] = pair.source_text;
    record[target_key] = pair.target_text;
    out << record.dump() << '\n';
  }
}

ParallelCorpus sample_corpus(const ParallelCorpus& corpus, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error("sample size must be at least 1");
  if (n >= corpus.size()) return corpus;

  std::vector<std::size_t> index(corpus.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(index.size() - i));
    std::swap(index[i], index[j]);
  }
  index.resize(n);
  std::sort(index.begin(), index.end());

  ParallelCorpus out{corpus.source_lang, corpus.target_lang, {}};
  out.pairs.reserve(n);
  for (const auto i : index) out.pairs.push_back(corpus.pairs[i]);
  return out;
}

}  // namespace lingrank::corpus
