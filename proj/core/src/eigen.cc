#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lingrank/error.h"
#include "lingrank/rng.h"
#include "lingrank/subspace.h"

namespace lingrank::subspace {
namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// a -= s * b
void axpy(Vec& a, double s, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= s * b[i];
}

Vec multiply(const Matrix& c, const Vec& v) {
  Vec out(c.rows(), 0.0);
  for (std::size_t i = 0; i < c.rows(); ++i) {
    const auto row = c.row(i);
    out[i] = std::inner_product(row.begin(), row.end(), v.begin(), 0.0);
  }
  return out;
}

Vec random_vector(std::size_t d, Rng& rng) {
  Vec v(d);
  for (auto& x : v) x = rng.normal();
  return v;
}

// Orthonormalizes `block` in place against `fixed` and against itself
// (modified Gram-Schmidt, two passes). Columns that collapse are replaced by
// fresh random directions.
void orthonormalize(std::vector<Vec>& block, const std::vector<Vec>& fixed, Rng& rng) {
  for (std::size_t j = 0; j < block.size(); ++j) {
    for (int attempt = 0;; ++attempt) {
      Vec& v = block[j];
      const double before = norm(v);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& f : fixed) axpy(v, dot(v, f), f);
        for (std::size_t i = 0; i < j; ++i) axpy(v, dot(v, block[i]), block[i]);
      }
      const double after = norm(v);
      if (after > 1e-10 * before && after > 0.0) {
        for (auto& x : v) x /= after;
        break;
      }
      if (attempt == 8) throw Error("eigen_spectrum: cannot extend orthonormal basis");
      v = random_vector(v.size(), rng);
    }
  }
}

// Cyclic Jacobi on a small dense symmetric matrix (row-major, m x m).
// Returns eigenvalues descending; column j of `vecs` holds eigenvector j.
void jacobi_eigen(std::vector<double> a, std::size_t m, Vec& values, std::vector<double>& vecs) {
  vecs.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) vecs[i * m + i] = 1.0;
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * m + c]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = 0; q < m; ++q) {
        total += at(p, q) * at(p, q);
        if (p != q) off += at(p, q) * at(p, q);
      }
    }
    if (off <= 1e-32 * total) break;

    for (std::size_t p = 0; p + 1 < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = std::abs(theta) > 1e150
                             ? 0.5 / theta
                             : std::copysign(1.0, theta) /
                                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double vkp = vecs[k * m + p], vkq = vecs[k * m + q];
          vecs[k * m + p] = c * vkp - s * vkq;
          vecs[k * m + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return at(x, x) > at(y, y); });
  values.resize(m);
  std::vector<double> sorted(m * m);
  for (std::size_t j = 0; j < m; ++j) {
    values[j] = at(order[j], order[j]);
    for (std::size_t k = 0; k < m; ++k) sorted[k * m + j] = vecs[k * m + order[j]];
  }
  vecs = std::move(sorted);
}

void fix_sign(Vec& v) {
  for (const double x : v) {
    if (std::abs(x) > 1e-12) {
      if (x < 0.0) {
        for (auto& y : v) y = -y;
      }
      return;
    }
  }
}

}  // namespace

EigenResult eigen_spectrum(const Matrix& c, std::size_t k, const EigenOptions& options) {
  const std::size_t d = c.rows();
  if (d == 0 || c.cols() != d) throw Error("eigen_spectrum: matrix must be square and non-empty");
  if (k < 1 || k > d) {
    throw Error("eigen_spectrum: k = " + std::to_string(k) + " outside [1, " + std::to_string(d) +
                "]");
  }

  double max_abs = 0.0, fro_sq = 0.0;
  for (const double x : c.values()) {
    if (!std::isfinite(x)) throw Error("eigen_spectrum: matrix has non-finite entries");
    max_abs = std::max(max_abs, std::abs(x));
    fro_sq += x * x;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::abs(c(i, j) - c(j, i)) > 1e-12 * max_abs) {
        throw Error("eigen_spectrum: matrix is not symmetric");
      }
    }
  }

  EigenResult result;
  const double fro = std::sqrt(fro_sq);
  if (fro == 0.0) {
    result.values.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      Vec e(d, 0.0);
      e[j] = 1.0;
      result.vectors.push_back(std::move(e));
    }
    return result;
  }

  // B = C + shift*I is iterated; a small positive shift keeps B from
  // annihilating null-space directions, and the Gershgorin bound makes B
  // positive semi-definite so its dominant eigenvalues are C's largest.
  double shift = 1e-6 * fro;
  if (!options.assume_psd) {
    double lower = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double radius = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j != i) radius += std::abs(c(i, j));
      }
      lower = std::min(lower, c(i, i) - radius);
    }
    shift -= lower;
  }

  const std::size_t block_size = std::min(d, k + std::max<std::size_t>(k, 8));
  const double threshold = options.tol * fro;

  Rng rng(0x6c696e6772616e6bULL);
  std::vector<Vec> locked;
  std::vector<double> locked_values;
  std::vector<Vec> active(block_size);
  for (auto& v : active) v = random_vector(d, rng);
  orthonormalize(active, locked, rng);

  std::size_t stalled = 0;
  for (;;) {
    const std::size_t m = active.size();
    std::vector<Vec> image(m);
    for (std::size_t j = 0; j < m; ++j) image[j] = multiply(c, active[j]);

    // Rayleigh-Ritz on the active block.
    std::vector<double> h(m * m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        const double v = 0.5 * (dot(active[i], image[j]) + dot(active[j], image[i]));
        h[i * m + j] = v;
        h[j * m + i] = v;
      }
    }
    Vec theta;
    std::vector<double> w;
    jacobi_eigen(std::move(h), m, theta, w);

    std::vector<Vec> ritz(m, Vec(d, 0.0));
    std::vector<Vec> ritz_image(m, Vec(d, 0.0));
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        const double wij = w[i * m + j];
        for (std::size_t r = 0; r < d; ++r) {
          ritz[j][r] += wij * active[i][r];
          ritz_image[j][r] += wij * image[i][r];
        }
      }
    }

    std::size_t taken = 0;
    double pending_residual = 0.0;
    for (std::size_t j = 0; j < m && locked.size() < k; ++j) {
      Vec r = ritz_image[j];
      axpy(r, theta[j], ritz[j]);
      const double residual = norm(r);
      if (residual > threshold) {
        pending_residual = residual;
        break;
      }
      Vec v = ritz[j];
      const double len = norm(v);
      for (auto& x : v) x /= len;
      locked.push_back(std::move(v));
      locked_values.push_back(theta[j]);
      result.max_residual = std::max(result.max_residual, residual);
      ++taken;
    }
    if (locked.size() >= k) break;

    ++result.iterations;
    stalled = taken > 0 ? 0 : stalled + 1;
    if (stalled >= options.max_iter) {
      throw Error("eigen_spectrum: eigenpair " + std::to_string(locked.size() + 1) +
                  " not converged after " + std::to_string(options.max_iter) +
                  " iterations (residual " + std::to_string(pending_residual) +
                  ", tolerance " + std::to_string(threshold) + ")");
    }

    std::vector<Vec> next;
    next.reserve(m - taken);
    for (std::size_t j = taken; j < m; ++j) {
      Vec y = ritz_image[j];
      for (std::size_t r = 0; r < d; ++r) y[r] += shift * ritz[j][r];
      next.push_back(std::move(y));
    }
    orthonormalize(next, locked, rng);
    active = std::move(next);
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return locked_values[x] > locked_values[y];
  });
  for (const auto i : order) {
    result.values.push_back(locked_values[i]);
    fix_sign(locked[i]);
    result.vectors.push_back(std::move(locked[i]));
  }
  return result;
}

}  // namespace lingrank::subspace
