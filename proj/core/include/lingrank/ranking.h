#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lingrank/matrix.h"

namespace lingrank::ranking {

struct RankedEntry {
  std::string id;
  double score = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

// Descending by score; equal scores ordered by id.
struct RankingList {
  std::vector<RankedEntry> entries;

  std::vector<std::string> ids() const;
  std::size_t size() const { return entries.size(); }

  friend bool operator==(const RankingList&, const RankingList&) = default;
};

// Longest common subsequence of two orderings of the same id set.
struct CommonOrderResult {
  std::size_t length = 0;
  double ratio = 0.0;  // length / n
  // Lexicographically smallest maximal common sublist, compared by positions
  // in the first list.
  std::vector<std::string> witness;
};

// Throws on an empty map or a non-finite score (naming the id).
RankingList rank_languages(const std::map<std::string, double>& scores);

// `a` and `b` must be permutations of one id set. Length is computed in
// O(n log n) as the longest increasing run of b's ids mapped to positions in a.
CommonOrderResult common_order_sublist(std::span<const std::string> a,
                                       std::span<const std::string> b);

struct NamedRanking {
  std::string model;
  RankingList ranking;
};

struct CorrelationMatrix {
  std::vector<std::string> models;
  Matrix ratio;  // symmetric, unit diagonal
};

// Pairwise common-order ratios between at least two rankings over the same ids.
CorrelationMatrix correlation_matrix(std::span<const NamedRanking> rankings);

}  // namespace lingrank::ranking
