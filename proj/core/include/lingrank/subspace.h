#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lingrank/embstore.h"
#include "lingrank/matrix.h"

// Anisotropy analysis of one language's embedding cloud: centering,
// population covariance, top-k eigen spectrum, the variance of the leading
// eigenvalues ("double variance") and a 2D principal-axis projection.
namespace lingrank::subspace {

inline constexpr std::size_t kDefaultK = 10;

// n samples (rows) by d dimensions.
struct EmbeddingMatrix {
  std::string lang;
  std::uint32_t layer = 0;
  Matrix data;
};

// Subtracts column means. Requires n >= 2.
EmbeddingMatrix center(const EmbeddingMatrix& m);

// C = (1/n) sum_i x_i x_i^T over centered rows, symmetrized as (C + C^T)/2.
Matrix covariance(const Matrix& centered);

struct EigenOptions {
  double tol = 1e-10;            // residual |Cv - lv| <= tol * |C|_F per returned pair
  std::size_t max_iter = 10'000; // iterations allowed per eigenpair
  // Skip the Gershgorin shift that makes an indefinite matrix safe for the
  // power method. Set for covariance matrices.
  bool assume_psd = false;
};

struct EigenResult {
  std::vector<double> values;               // descending, length k
  std::vector<std::vector<double>> vectors; // unit eigenvectors, same order
  double max_residual = 0.0;
  std::size_t iterations = 0;
};

// Top-k eigenpairs of a symmetric matrix by block power iteration with
// Rayleigh-Ritz extraction; converged pairs are locked and deflated out of the
// active block. Each eigenvector's first non-negligible component is positive.
// Throws lingrank::Error with the achieved residual on non-convergence.
EigenResult eigen_spectrum(const Matrix& c, std::size_t k, const EigenOptions& options = {});

// Population variance of the top-k entries of a descending spectrum. With
// `normalize`, values are first divided by the spectrum total: the sum of the
// supplied values, or `spectrum_total` when the caller knows the full trace.
double double_variance(std::span<const double> eigenvalues, std::size_t k, bool normalize = true,
                       std::optional<double> spectrum_total = std::nullopt);

struct SubspaceStats {
  std::vector<double> eigenvalues;  // descending, length k_used
  double double_variance = 0.0;
  std::size_t k_used = 0;
  bool normalized = true;
  std::size_t n_samples = 0;
  std::size_t dim = 0;
};

// Full analysis of one cloud. k defaults to min(kDefaultK, d).
SubspaceStats analyze(const EmbeddingMatrix& m, std::optional<std::size_t> k = std::nullopt,
                      bool normalize = true, const EigenOptions& options = {});

struct Projection2D {
  Matrix coords;                   // n x 2
  std::array<double, 2> explained; // (lambda_1, lambda_2)
};

// Centered data projected onto the two leading principal axes. Requires
// n >= 3, d >= 2 and a non-degenerate cloud.
Projection2D project_2d(const EmbeddingMatrix& m, const EigenOptions& options = {});

enum class Side { source, target };

const char* side_name(Side side);
Side parse_side(const std::string& name);

// Stacks every vector of each language appearing on `side` at `layer`
// (pairs in header order, samples in store order).
std::map<std::string, EmbeddingMatrix> language_matrices(const embstore::EmbeddingStore& store,
                                                         Side side, std::uint32_t layer);

// Default layer when none is given: deepest default-subset layer present in
// the store, otherwise the deepest store layer.
std::uint32_t default_layer(const embstore::StoreHeader& header);

std::map<std::string, SubspaceStats> subspace_report(const embstore::EmbeddingStore& store,
                                                     Side side, std::uint32_t layer,
                                                     std::optional<std::size_t> k = std::nullopt,
                                                     bool normalize = true);

}  // namespace lingrank::subspace
