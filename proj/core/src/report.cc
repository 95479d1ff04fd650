#include "lingrank/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

#include "lingrank/error.h"

namespace lingrank::report {
namespace {

std::string where(std::size_t row) { return "row " + std::to_string(row) + ": "; }

std::uint32_t parse_u32(const std::string& text) {
  std::uint32_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error("not an unsigned integer: \"" + text + "\"");
  return v;
}

void require_header(const std::vector<CsvRow>& rows, std::span<const std::string> expected,
                    const char* what) {
  if (rows.empty()) throw Error(std::string(what) + ": empty file");
  const auto& h = rows.front();
  if (h.size() < expected.size() || !std::equal(expected.begin(), expected.end(), h.begin())) {
    throw Error(std::string(what) + ": header must start with " + csv_line(expected));
  }
}

std::vector<std::uint32_t> layer_columns(std::span<const simcore::SimilarityProfile> profiles) {
  std::set<std::uint32_t> layers;
  for (const auto& p : profiles) {
    for (const auto& l : p.per_layer) layers.insert(l.layer);
  }
  return {layers.begin(), layers.end()};
}

const simcore::LayerSimilarity* find_layer(const simcore::SimilarityProfile& p, std::uint32_t l) {
  for (const auto& ls : p.per_layer) {
    if (ls.layer == l) return &ls;
  }
  return nullptr;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error("not a number: \"" + text + "\"");
  }
  return v;
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        row_has_content = false;
        break;
      default:
        field.push_back(c);
        row_has_content = true;
    }
  }
  if (quoted) throw Error("unterminated quoted CSV field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_line(std::span<const std::string> fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    const auto& f = fields[i];
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
      out += f;
    } else {
      out.push_back('"');
      for (const char c : f) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
      }
      out.push_back('"');
    }
  }
  out.push_back('\n');
  return out;
}

SimilarityTable emit_similarity_table(std::span<const simcore::SimilarityProfile> profiles) {
  const auto layers = layer_columns(profiles);
  std::vector<const simcore::SimilarityProfile*> order;
  for (const auto& p : profiles) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->aggregate != b->aggregate) return a->aggregate > b->aggregate;
    return a->pair_id < b->pair_id;
  });

  std::vector<std::string> header = {"pair_id", "source_lang", "target_lang", "aggregate"};
  for (const auto l : layers) header.push_back("layer_" + std::to_string(l));

  SimilarityTable out;
  out.csv = csv_line(header);
  auto md_row = [](const std::vector<std::string>& cells) {
    std::string s = "|";
    for (const auto& c : cells) s += " " + c + " |";
    return s + "\n";
  };
  out.markdown = md_row(header);
  out.markdown += "|";
  for (std::size_t i = 0; i < header.size(); ++i) out.markdown += i < 3 ? " --- |" : " ---: |";
  out.markdown += "\n";

  for (const auto* p : order) {
    std::vector<std::string> cells = {p->pair_id, p->source_lang, p->target_lang,
                                      format_double(p->aggregate)};
    for (const auto l : layers) {
      const auto* ls = find_layer(*p, l);
      cells.push_back(ls ? format_double(ls->mean_cos) : "");
    }
    out.csv += csv_line(cells);
    out.markdown += md_row(cells);
  }
  return out;
}

std::vector<SimilarityRow> parse_similarity_table(std::istream& in) {
  const auto rows = read_csv(in);
  const std::string expected[] = {"pair_id", "source_lang", "target_lang", "aggregate"};
  require_header(rows, expected, "similarity table");
  const auto& header = rows.front();
  std::vector<std::uint32_t> layers;
  for (std::size_t c = 4; c < header.size(); ++c) {
    if (header[c].rfind("layer_", 0) != 0) {
      throw Error("similarity table: unexpected column \"" + header[c] + "\"");
    }
    layers.push_back(parse_u32(header[c].substr(6)));
  }

  std::vector<SimilarityRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error("similarity table: " + where(r + 1) + "expected " +
                  std::to_string(header.size()) + " fields, got " + std::to_string(row.size()));
    }
    try {
      SimilarityRow s{row[0], row[1], row[2], parse_double(row[3]), {}};
      for (std::size_t c = 4; c < row.size(); ++c) {
        if (!row[c].empty()) s.layers.emplace_back(layers[c - 4], parse_double(row[c]));
      }
      out.push_back(std::move(s));
    } catch (const Error& e) {
      throw Error("similarity table: " + where(r + 1) + e.what());
    }
  }
  return out;
}

ScoreKey parse_score_key(const std::string& name) {
  if (name == "target" || name == "target_lang") return ScoreKey::target_lang;
  if (name == "pair" || name == "pair_id") return ScoreKey::pair_id;
  throw Error("ranking key must be \"target\" or \"pair\", got \"" + name + "\"");
}

std::map<std::string, double> aggregate_scores(std::span<const SimilarityRow> rows, ScoreKey key) {
  std::map<std::string, double> out;
  for (const auto& r : rows) {
    const auto& id = key == ScoreKey::target_lang ? r.target_lang : r.pair_id;
    if (!out.emplace(id, r.aggregate).second) {
      throw Error("duplicate key \"" + id + "\"" +
                  (key == ScoreKey::target_lang ? " (rank by pair id instead)" : ""));
    }
  }
  return out;
}

std::string emit_layer_curves(std::span<const simcore::SimilarityProfile> profiles) {
  std::string out = "pair_id,layer,mean_cos,n_used,n_skipped\n";
  for (const auto& p : profiles) {
    auto per_layer = p.per_layer;
    std::stable_sort(per_layer.begin(), per_layer.end(),
                     [](const auto& a, const auto& b) { return a.layer < b.layer; });
    for (const auto& l : per_layer) {
      const std::string cells[] = {p.pair_id, std::to_string(l.layer), format_double(l.mean_cos),
                                   std::to_string(l.n_used), std::to_string(l.n_skipped)};
      out += csv_line(cells);
    }
  }
  return out;
}

std::string emit_ranking(const ranking::RankingList& list) {
  std::string out = "rank,id,score\n";
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const std::string cells[] = {std::to_string(i + 1), list.entries[i].id,
                                 format_double(list.entries[i].score)};
    out += csv_line(cells);
  }
  return out;
}

ranking::RankingList parse_ranking(std::istream& in) {
  const auto rows = read_csv(in);
  const std::string expected[] = {"rank", "id", "score"};
  require_header(rows, expected, "ranking");
  ranking::RankingList out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3) throw Error("ranking: " + where(r + 1) + "expected 3 fields");
    try {
      out.entries.push_back({rows[r][1], parse_double(rows[r][2])});
    } catch (const Error& e) {
      throw Error("ranking: " + where(r + 1) + e.what());
    }
  }
  if (out.entries.empty()) throw Error("ranking: no entries");
  return out;
}

std::string emit_correlation_matrix(const ranking::CorrelationMatrix& matrix) {
  std::vector<std::string> header = {"model"};
  header.insert(header.end(), matrix.models.begin(), matrix.models.end());
  std::string out = csv_line(header);
  for (std::size_t i = 0; i < matrix.models.size(); ++i) {
    std::vector<std::string> cells = {matrix.models[i]};
    for (std::size_t j = 0; j < matrix.models.size(); ++j) {
      cells.push_back(format_double(matrix.ratio(i, j)));
    }
    out += csv_line(cells);
  }
  return out;
}

ExternalScalars parse_external_scalars(std::istream& in) {
  const auto rows = read_csv(in);
  if (rows.empty()) throw Error("external scalars: empty file");
  if (rows.front().size() != 2 || rows.front()[0] != "lang") {
    throw Error("external scalars: header must be lang,<name>");
  }
  ExternalScalars out{rows.front()[1], {}};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw Error("external scalars: " + where(r + 1) + "expected 2 fields");
    double v = 0.0;
    try {
      v = parse_double(rows[r][1]);
    } catch (const Error& e) {
      throw Error("external scalars: " + where(r + 1) + e.what());
    }
    if (!std::isfinite(v)) {
      throw Error("external scalars: " + where(r + 1) + "non-finite value for " + rows[r][0]);
    }
    if (!out.values.emplace(rows[r][0], v).second) {
      throw Error("external scalars: duplicate language \"" + rows[r][0] + "\"");
    }
  }
  return out;
}

CorrelationMethod parse_method(const std::string& name) {
  if (name == "pearson") return CorrelationMethod::pearson;
  if (name == "spearman") return CorrelationMethod::spearman;
  throw Error("method must be \"pearson\" or \"spearman\", got \"" + name + "\"");
}

const char* method_name(CorrelationMethod method) {
  return method == CorrelationMethod::pearson ? "pearson" : "spearman";
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("pearson: need two equal-length samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("correlation undefined: a variable is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

CorrelationReport correlate_external(const std::map<std::string, double>& sims,
                                     const ExternalScalars& ext, CorrelationMethod method) {
  CorrelationReport out;
  out.method = method;
  std::vector<double> x, y;
  for (const auto& [lang, s] : sims) {
    const auto it = ext.values.find(lang);
    if (it == ext.values.end()) {
      out.excluded.push_back(lang);
      continue;
    }
    if (!std::isfinite(s) || !std::isfinite(it->second)) {
      throw Error("non-finite value for language " + lang);
    }
    out.languages_used.push_back(lang);
    x.push_back(s);
    y.push_back(it->second);
  }
  for (const auto& [lang, v] : ext.values) {
    if (!sims.count(lang)) out.excluded.push_back(lang);
  }
  std::sort(out.excluded.begin(), out.excluded.end());
  out.n = x.size();
  if (out.n < 3) {
    throw Error("need at least 3 shared languages to correlate, got " + std::to_string(out.n));
  }
  if (method == CorrelationMethod::spearman) {
    out.coefficient = pearson(average_ranks(x), average_ranks(y));
  } else {
    out.coefficient = pearson(x, y);
  }
  return out;
}

std::string emit_correlation_report(const CorrelationReport& report, const std::string& ext_name) {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ";") + x;
    return s;
  };
  const std::string header[] = {"external", "method", "coefficient", "n", "languages_used",
                                "excluded"};
  const std::string row[] = {ext_name,
                             method_name(report.method),
                             format_double(report.coefficient),
                             std::to_string(report.n),
                             join(report.languages_used),
                             join(report.excluded)};
  return csv_line(header) + csv_line(row);
}

std::string emit_subspace_table(const std::map<std::string, subspace::SubspaceStats>& stats,
                                std::uint32_t layer, subspace::Side side,
                                const std::map<std::string, double>* sims) {
  std::size_t max_k = 0;
  for (const auto& [lang, s] : stats) max_k = std::max(max_k, s.eigenvalues.size());

  std::vector<std::string> header = {"lang",      "layer", "side",           "k",
                                     "normalized", "n_samples", "dim", "double_variance",
                                     "similarity"};
  for (std::size_t i = 1; i <= max_k; ++i) header.push_back("lambda_" + std::to_string(i));

  std::vector<std::string> order;
  for (const auto& [lang, s] : stats) order.push_back(lang);
  if (sims) {
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      const auto ia = sims->find(a);
      const auto ib = sims->find(b);
      if (ia == sims->end() || ib == sims->end()) return ia != sims->end() && ib == sims->end();
      return ia->second > ib->second;
    });
  }

  std::string out = csv_line(header);
  for (const auto& lang : order) {
    const auto& s = stats.at(lang);
    std::vector<std::string> cells = {lang,
                                      std::to_string(layer),
                                      subspace::side_name(side),
                                      std::to_string(s.k_used),
                                      s.normalized ? "true" : "false",
                                      std::to_string(s.n_samples),
                                      std::to_string(s.dim),
                                      format_double(s.double_variance)};
    const auto it = sims ? sims->find(lang) : std::map<std::string, double>::const_iterator{};
    cells.push_back(sims && it != sims->end() ? format_double(it->second) : "");
    for (std::size_t i = 0; i < max_k; ++i) {
      cells.push_back(i < s.eigenvalues.size() ? format_double(s.eigenvalues[i]) : "");
    }
    out += csv_line(cells);
  }
  return out;
}

std::string emit_projection_csv(
    std::span<const std::pair<std::string, subspace::Projection2D>> projections,
    std::uint32_t layer) {
  std::string out = "lang,layer,idx,pc1,pc2\n";
  for (const auto& [lang, proj] : projections) {
    for (std::size_t i = 0; i < proj.coords.rows(); ++i) {
      const std::string cells[] = {lang, std::to_string(layer), std::to_string(i),
                                   format_double(proj.coords(i, 0)),
                                   format_double(proj.coords(i, 1))};
      out += csv_line(cells);
    }
  }
  return out;
}

}  // namespace lingrank::report
