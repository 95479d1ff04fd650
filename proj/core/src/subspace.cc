#include "lingrank/subspace.h"

#include <algorithm>
#include <cmath>

#include "lingrank/error.h"
#include "lingrank/simcore.h"

namespace lingrank::subspace {
namespace {

void require_shape(const EmbeddingMatrix& m, std::size_t min_rows, std::size_t min_cols) {
  if (m.data.rows() < min_rows) {
    throw Error("need at least " + std::to_string(min_rows) + " samples, got " +
                std::to_string(m.data.rows()));
  }
  if (m.data.cols() < min_cols) {
    throw Error("need at least " + std::to_string(min_cols) + " dimensions, got " +
                std::to_string(m.data.cols()));
  }
}

double trace(const Matrix& c) {
  double t = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i) t += c(i, i);
  return t;
}

EigenOptions psd(EigenOptions options) {
  options.assume_psd = true;
  return options;
}

}  // namespace

EmbeddingMatrix center(const EmbeddingMatrix& m) {
  require_shape(m, 2, 1);
  EmbeddingMatrix out = m;
  const std::size_t n = out.data.rows();
  const std::size_t d = out.data.cols();
  // Two passes: the second removes the rounding left by the first.
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = out.data.row(i);
      for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
    }
    for (auto& x : mean) x /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = out.data.row(i);
      for (std::size_t j = 0; j < d; ++j) row[j] -= mean[j];
    }
  }
  return out;
}

Matrix covariance(const Matrix& centered) {
  const std::size_t n = centered.rows();
  const std::size_t d = centered.cols();
  if (n == 0) throw Error("covariance of an empty matrix");
  Matrix c(d, d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto x = centered.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = x[i];
      for (std::size_t j = i; j < d; ++j) c(i, j) += xi * x[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      c(i, j) *= inv_n;
      c(j, i) = c(i, j);
    }
  }
  return c;
}

double double_variance(std::span<const double> eigenvalues, std::size_t k, bool normalize,
                       std::optional<double> spectrum_total) {
  if (k < 2) throw Error("double variance needs K >= 2, got " + std::to_string(k));
  if (eigenvalues.size() < k) {
    throw Error("double variance needs " + std::to_string(k) + " eigenvalues, got " +
                std::to_string(eigenvalues.size()));
  }
  if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end(), std::greater<>())) {
    throw Error("eigenvalues must be in descending order");
  }
  double scale = 1.0;
  if (normalize) {
    double total = 0.0;
    if (spectrum_total) {
      total = *spectrum_total;
    } else {
      for (const double v : eigenvalues) total += v;
    }
    if (!(total > 0.0)) throw Error("eigenvalue sum must be positive to normalize");
    scale = 1.0 / total;
  }
  // Deviations are taken from the leading value first, so an equal spectrum
  // gives exactly zero.
  std::vector<double> shifted(k);
  for (std::size_t i = 0; i < k; ++i) shifted[i] = (eigenvalues[i] - eigenvalues[0]) * scale;
  double mean = 0.0;
  for (const double v : shifted) mean += v;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (const double v : shifted) var += (v - mean) * (v - mean);
  return var / static_cast<double>(k);
}

SubspaceStats analyze(const EmbeddingMatrix& m, std::optional<std::size_t> k, bool normalize,
                      const EigenOptions& options) {
  require_shape(m, 2, 2);
  const std::size_t d = m.data.cols();
  const std::size_t k_used = k.value_or(std::min(kDefaultK, d));
  if (k_used < 2 || k_used > d) {
    throw Error("K = " + std::to_string(k_used) + " outside [2, " + std::to_string(d) + "]");
  }
  const Matrix c = covariance(center(m).data);
  auto eig = eigen_spectrum(c, k_used, psd(options));

  SubspaceStats stats;
  stats.k_used = k_used;
  stats.normalized = normalize;
  stats.n_samples = m.data.rows();
  stats.dim = d;
  stats.double_variance = double_variance(eig.values, k_used, normalize,
                                          normalize ? std::optional(trace(c)) : std::nullopt);
  stats.eigenvalues = std::move(eig.values);
  return stats;
}

Projection2D project_2d(const EmbeddingMatrix& m, const EigenOptions& options) {
  require_shape(m, 3, 2);
  double mean_sq = 0.0;
  for (const double x : m.data.values()) mean_sq += x * x;
  mean_sq /= static_cast<double>(m.data.values().size());

  const auto centered = center(m);
  const auto eig = eigen_spectrum(covariance(centered.data), 2, psd(options));
  if (!(eig.values[0] > 1e-24 * mean_sq) || !(eig.values[0] > 0.0)) {
    throw Error("degenerate cloud: all points coincide");
  }

  Projection2D out;
  out.explained = {eig.values[0], eig.values[1]};
  out.coords = Matrix(m.data.rows(), 2);
  for (std::size_t i = 0; i < m.data.rows(); ++i) {
    const auto row = centered.data.row(i);
    for (std::size_t a = 0; a < 2; ++a) {
      double s = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * eig.vectors[a][j];
      out.coords(i, a) = s;
    }
  }
  return out;
}

const char* side_name(Side side) { return side == Side::source ? "source" : "target"; }

Side parse_side(const std::string& name) {
  if (name == "source") return Side::source;
  if (name == "target") return Side::target;
  throw Error("side must be \"source\" or \"target\", got \"" + name + "\"");
}

std::map<std::string, EmbeddingMatrix> language_matrices(const embstore::EmbeddingStore& store,
                                                         Side side, std::uint32_t layer) {
  const auto pos = store.header.layer_position(layer);
  if (!pos) throw Error("layer " + std::to_string(layer) + " not in store");

  std::map<std::string, std::vector<const embstore::PairBlock*>> by_lang;
  for (const auto& block : store.blocks) {
    const auto& lang = side == Side::source ? block.meta.source_lang : block.meta.target_lang;
    by_lang[lang].push_back(&block);
  }

  std::map<std::string, EmbeddingMatrix> out;
  for (const auto& [lang, blocks] : by_lang) {
    std::size_t rows = 0;
    for (const auto* b : blocks) rows += (side == Side::source ? b->source : b->target).samples();
    EmbeddingMatrix m{lang, layer, Matrix(rows, store.header.dim)};
    std::size_t r = 0;
    for (const auto* b : blocks) {
      const auto& t = side == Side::source ? b->source : b->target;
      for (std::size_t i = 0; i < t.samples(); ++i, ++r) {
        const auto v = t.vec(*pos, i);
        std::copy(v.begin(), v.end(), m.data.row(r).begin());
      }
    }
    out.emplace(lang, std::move(m));
  }
  return out;
}

std::uint32_t default_layer(const embstore::StoreHeader& header) {
  if (header.layers.empty()) throw Error("store has no layers");
  for (auto it = std::rbegin(simcore::kDefaultSubset); it != std::rend(simcore::kDefaultSubset);
       ++it) {
    if (header.layer_position(*it)) return *it;
  }
  return *std::max_element(header.layers.begin(), header.layers.end());
}

std::map<std::string, SubspaceStats> subspace_report(const embstore::EmbeddingStore& store,
                                                     Side side, std::uint32_t layer,
                                                     std::optional<std::size_t> k,
                                                     bool normalize) {
  std::map<std::string, SubspaceStats> out;
  for (const auto& [lang, m] : language_matrices(store, side, layer)) {
    try {
      out.emplace(lang, analyze(m, k, normalize));
    } catch (const Error& e) {
      throw Error("language " + lang + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lingrank::subspace
