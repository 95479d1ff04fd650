#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace lingrank::oracle {

std::size_t brute_force_common_length(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  const std::size_t n = a.size();
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) sub.push_back(a[i]);
    }
    std::size_t j = 0;
    for (const auto& id : b) {
      if (j < sub.size() && sub[j] == id) ++j;
    }
    if (j == sub.size()) best = std::max(best, sub.size());
  }
  return best;
}

std::vector<double> reference_eigenvalues(const Matrix& c) {
  const auto d = static_cast<Eigen::Index>(c.rows());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = c(i, j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  std::vector<double> values(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

double sum_formula_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

Matrix random_symmetric(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      m(i, j) = u(gen);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

Matrix random_orthogonal(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a(i, j) = g(gen);
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out(i, j) = q(i, j);
  }
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  }
  return out;
}

std::vector<std::string> letters(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

}  // namespace lingrank::oracle
