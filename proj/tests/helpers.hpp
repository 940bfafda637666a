#pragma once

#include <random>
#include <string>

#include "alphacomb/optimizer.hpp"
#include "alphacomb/synth.hpp"

namespace testutil {

using namespace alphacomb;

inline ReturnsPanel make_panel(const RowMatrix& r) {
  ReturnsPanel p;
  p.returns = r;
  for (Index i = 0; i < r.rows(); ++i) p.alpha_ids.push_back("alpha_" + std::to_string(i));
  for (Index s = 0; s < r.cols(); ++s) p.time_labels.push_back("t_" + std::to_string(s + 1));
  p.validate();
  return p;
}

inline RowMatrix random_rows(Index n, Index cols, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  RowMatrix r(n, cols);
  for (Index i = 0; i < n; ++i)
    for (Index s = 0; s < cols; ++s) r(i, s) = nd(rng);
  return r;
}

inline Matrix random_matrix(Index rows, Index cols, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = nd(rng);
  return m;
}

inline Vector random_vector(Index n, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

inline Vector positive_vector(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = std::exp(0.3 * nd(rng));
  return v;
}

// max |a - b| / max |b|, the "max relative error" used throughout.
inline double rel_err(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline ExpectedReturns expected_of(const Vector& v) {
  ExpectedReturns e;
  e.values = v;
  return e;
}

inline Matrix uniform_correlation_cov(const Vector& sigma, double rho) {
  const Index n = sigma.size();
  Matrix c(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) c(i, j) = (i == j ? 1.0 : rho) * sigma[i] * sigma[j];
  return c;
}

}  // namespace testutil
