#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lingrank::corpus {

// One aligned sentence pair. `source_text` is always the baseline side
// (English in an English-centric corpus).
struct SentencePair {
  std::string source_text;
  std::string target_text;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

struct ParallelCorpus {
  std::string source_lang;
  std::string target_lang;
  // Index i is the alignment key for every downstream artifact.
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  friend bool operator==(const ParallelCorpus&, const ParallelCorpus&) = default;
};

// Language codes supplied by the caller; they are never inferred from keys.
struct LanguagePair {
  std::string source;
  std::string target;
};

// Reads one JSON object per line, e.g.
//   {"German": "Ich wollte ...", "English": "I wanted ..."}
// with source_key = "English", target_key = "German". Blank lines are
// ignored. Errors carry the 1-based line number.
ParallelCorpus parse_jsonl_corpus(std::istream& in, const std::string& source_key,
                                  const std::string& target_key, const LanguagePair& langs);
ParallelCorpus parse_jsonl_corpus(const std::filesystem::path& path,
                                  const std::string& source_key,
                                  const std::string& target_key, const LanguagePair& langs);

struct TsvOptions {
  std::size_t source_col = 0;
  std::size_t target_col = 1;
  bool skip_header = false;
};

// Tab-separated rows. Empty lines are ignored; a trailing '\r' is stripped.
// Errors carry the 1-based physical row number (header included).
ParallelCorpus parse_tsv_corpus(std::istream& in, const TsvOptions& options,
                                const LanguagePair& langs);
ParallelCorpus parse_tsv_corpus(const std::filesystem::path& path, const TsvOptions& options,
                                const LanguagePair& langs);

// Writes the corpus back as JSONL with the given keys.
void write_jsonl_corpus(const ParallelCorpus& corpus, std::ostream& out,
                        const std::string& source_key, const std::string& target_key);

// Uniform sample of n pairs without replacement, returned in original order.
// If n >= corpus.size() the corpus is returned unchanged. Uses a partial
// Fisher-Yates shuffle driven by lingrank::Rng.
ParallelCorpus sample_corpus(const ParallelCorpus& corpus, std::size_t n, std::uint64_t seed);

}  // namespace lingrank::corpus
