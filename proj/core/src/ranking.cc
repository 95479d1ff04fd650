#include "lingrank/ranking.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "lingrank/error.h"

namespace lingrank::ranking {
namespace {

// Length of the longest strictly increasing subsequence ending at each index.
std::vector<std::size_t> lis_ending_at(std::span<const std::size_t> seq) {
  std::vector<std::size_t> tails;  // tails[k] = smallest tail of an increasing run of length k+1
  std::vector<std::size_t> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto it = std::lower_bound(tails.begin(), tails.end(), seq[i]);
    out[i] = static_cast<std::size_t>(it - tails.begin()) + 1;
    if (it == tails.end()) {
      tails.push_back(seq[i]);
    } else {
      *it = seq[i];
    }
  }
  return out;
}

std::string describe_difference(std::span<const std::string> a, std::span<const std::string> b) {
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  std::string only_a, only_b;
  for (const auto& id : sa) {
    if (!sb.count(id)) only_a += (only_a.empty() ? "" : ", ") + id;
  }
  for (const auto& id : sb) {
    if (!sa.count(id)) only_b += (only_b.empty() ? "" : ", ") + id;
  }
  return "only in first: [" + only_a + "]; only in second: [" + only_b + "]";
}

void check_unique(std::span<const std::string> ids, const char* which) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw Error(std::string("duplicate id \"") + id + "\" in " + which + " list");
    }
  }
}

}  // namespace

std::vector<std::string> RankingList::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

RankingList rank_languages(const std::map<std::string, double>& scores) {
  if (scores.empty()) throw Error("no scores to rank");
  RankingList out;
  for (const auto& [id, score] : scores) {
    if (!std::isfinite(score)) throw Error("non-finite score for \"" + id + "\"");
    out.entries.push_back({id, score});
  }
  // Map iteration is already in id order; a stable sort keeps that for ties.
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const RankedEntry& x, const RankedEntry& y) { return x.score > y.score; });
  return out;
}

CommonOrderResult common_order_sublist(std::span<const std::string> a,
                                       std::span<const std::string> b) {
  if (a.empty() || b.empty()) throw Error("cannot compare empty rankings");
  check_unique(a, "first");
  check_unique(b, "second");

  std::unordered_map<std::string, std::size_t> pos_in_a;
  for (std::size_t i = 0; i < a.size(); ++i) pos_in_a.emplace(a[i], i);
  std::vector<std::size_t> seq;
  seq.reserve(b.size());
  for (const auto& id : b) {
    const auto it = pos_in_a.find(id);
    if (it == pos_in_a.end()) throw Error("rankings are not over the same ids: " + describe_difference(a, b));
    seq.push_back(it->second);
  }
  if (a.size() != b.size()) throw Error("rankings are not over the same ids: " + describe_difference(a, b));

  const std::size_t n = seq.size();
  const auto ending = lis_ending_at(seq);
  const std::size_t length = *std::max_element(ending.begin(), ending.end());

  // starting[i]: longest increasing run that begins at i. Reversing the
  // sequence and flipping values turns it into an "ending at" problem.
  std::vector<std::size_t> flipped(n);
  for (std::size_t i = 0; i < n; ++i) flipped[i] = n - 1 - seq[n - 1 - i];
  const auto rev = lis_ending_at(flipped);
  std::vector<std::size_t> starting(n);
  for (std::size_t i = 0; i < n; ++i) starting[i] = rev[n - 1 - i];

  // Greedy: at each step take the smallest a-position that can still be
  // extended to a full-length run.
  CommonOrderResult out;
  out.length = length;
  out.ratio = static_cast<double>(length) / static_cast<double>(n);
  std::size_t from = 0;
  std::size_t last_value = 0;
  bool have_last = false;
  for (std::size_t need = length; need > 0; --need) {
    std::size_t best = n;
    for (std::size_t j = from; j < n; ++j) {
      if (starting[j] >= need && (!have_last || seq[j] > last_value) &&
          (best == n || seq[j] < seq[best])) {
        best = j;
      }
    }
    out.witness.push_back(a[seq[best]]);
    last_value = seq[best];
    have_last = true;
    from = best + 1;
  }
  return out;
}

CorrelationMatrix correlation_matrix(std::span<const NamedRanking> rankings) {
  if (rankings.size() < 2) throw Error("need at least two rankings to correlate");
  std::set<std::string> names;
  for (const auto& r : rankings) {
    if (!names.insert(r.model).second) throw Error("duplicate model name \"" + r.model + "\"");
  }

  std::vector<std::vector<std::string>> ids;
  for (const auto& r : rankings) ids.push_back(r.ranking.ids());
  const std::set<std::string> reference(ids[0].begin(), ids[0].end());
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    const std::set<std::string> these(ids[i].begin(), ids[i].end());
    if (these != reference || these.size() != ids[i].size()) {
      throw Error("model " + rankings[i].model + ": ranked ids differ from model " +
                  rankings[0].model + " (" + describe_difference(ids[0], ids[i]) + ")");
    }
  }

  CorrelationMatrix out;
  for (const auto& r : rankings) out.models.push_back(r.model);
  const std::size_t m = rankings.size();
  out.ratio = Matrix(m, m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    out.ratio(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double r = common_order_sublist(ids[i], ids[j]).ratio;
      out.ratio(i, j) = r;
      out.ratio(j, i) = r;
    }
  }
  return out;
}

}  // namespace lingrank::ranking
