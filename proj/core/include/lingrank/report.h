#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lingrank/ranking.h"
#include "lingrank/simcore.h"
#include "lingrank/subspace.h"

// Tabular output (CSV, Markdown) for every analysis, the matching readers,
// and the join of similarity scores against external per-language scalars.
//
// Numbers are written in the shortest form that parses back to the same
// double, so output is byte-stable and lossless.
namespace lingrank::report {

std::string format_double(double v);
double parse_double(const std::string& text);

// Minimal RFC 4180 reader/writer: comma separated, double-quote escaping.
using CsvRow = std::vector<std::string>;
std::vector<CsvRow> read_csv(std::istream& in);
std::string csv_line(std::span<const std::string> fields);

// --- similarity tables ------------------------------------------------------

struct SimilarityTable {
  std::string csv;
  std::string markdown;
};

// Columns: pair_id,source_lang,target_lang,aggregate,layer_<L>...
// Rows sorted by aggregate, descending (ties by pair_id).
SimilarityTable emit_similarity_table(std::span<const simcore::SimilarityProfile> profiles);

struct SimilarityRow {
  std::string pair_id;
  std::string source_lang;
  std::string target_lang;
  double aggregate = 0.0;
  std::vector<std::pair<std::uint32_t, double>> layers;
};

std::vector<SimilarityRow> parse_similarity_table(std::istream& in);

enum class ScoreKey { target_lang, pair_id };
ScoreKey parse_score_key(const std::string& name);

// Aggregate score per target language (or pair id). Duplicate keys throw.
std::map<std::string, double> aggregate_scores(std::span<const SimilarityRow> rows, ScoreKey key);

// Long format: pair_id,layer,mean_cos,n_used,n_skipped; header order, layers ascending.
std::string emit_layer_curves(std::span<const simcore::SimilarityProfile> profiles);

// --- rankings ---------------------------------------------------------------

// Columns: rank,id,score (rank is 1-based).
std::string emit_ranking(const ranking::RankingList& list);
ranking::RankingList parse_ranking(std::istream& in);

// Columns: model,<model_1>,...,<model_m>.
std::string emit_correlation_matrix(const ranking::CorrelationMatrix& matrix);

// --- external joins ---------------------------------------------------------

struct ExternalScalars {
  std::string name;
  std::map<std::string, double> values;
};

// CSV with header `lang,<name>`; the second header cell becomes the name.
ExternalScalars parse_external_scalars(std::istream& in);

enum class CorrelationMethod { pearson, spearman };
CorrelationMethod parse_method(const std::string& name);
const char* method_name(CorrelationMethod method);

struct CorrelationReport {
  CorrelationMethod method = CorrelationMethod::pearson;
  double coefficient = 0.0;
  std::size_t n = 0;
  std::vector<std::string> languages_used;
  std::vector<std::string> excluded;  // in only one of the inputs
};

double pearson(std::span<const double> x, std::span<const double> y);
// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Joins on the exact language code. Needs at least three shared languages.
CorrelationReport correlate_external(const std::map<std::string, double>& sims,
                                     const ExternalScalars& ext, CorrelationMethod method);

std::string emit_correlation_report(const CorrelationReport& report, const std::string& ext_name);

// --- subspace ---------------------------------------------------------------

// Columns: lang,layer,side,k,normalized,n_samples,dim,double_variance,
// similarity,lambda_1..lambda_K. With `sims`, rows are sorted by similarity
// descending (languages without a score last); otherwise by language code.
std::string emit_subspace_table(const std::map<std::string, subspace::SubspaceStats>& stats,
                                std::uint32_t layer, subspace::Side side,
                                const std::map<std::string, double>* sims = nullptr);

// Columns: lang,layer,idx,pc1,pc2.
std::string emit_projection_csv(
    std::span<const std::pair<std::string, subspace::Projection2D>> projections,
    std::uint32_t layer);

}  // namespace lingrank::report
