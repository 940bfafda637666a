#pragma once

#include "alphacomb/common.hpp"

namespace alphacomb {

/// OLS summary for the regression of flattened correlations over the style
/// tensor columns, with intercept. Laid out to print as
/// Estimate / Standard error / t-statistic / Overall.
struct StyleRegressionReport {
  Vector coefficients;     // intercept, y, z
  Vector standard_errors;
  Vector t_statistics;
  double r_squared = 0.0;
  double adjusted_r_squared = 0.0;
  double f_statistic = 0.0;
  Index n_points = 0;      // L = N(N-1)/2
};

struct StyleTensors {
  Vector x;  // all ones (the intercept column)
  Vector y;  // u_i nu_j + u_j nu_i, flattened
  Vector z;  // nu_i nu_j, flattened
};

/// Off-diagonal lower triangle of a symmetric matrix as a vector; ordering
/// is (i, j) with i > j, j-major ascending then i ascending.
Vector flatten_offdiag(const Matrix& psi);

/// Index pair for flattened position a (inverse of the flatten ordering).
std::pair<Index, Index> offdiag_index(Index a, Index n);

StyleTensors style_tensors(const Vector& nu);

StyleRegressionReport style_regression(const Vector& psi_a, const Vector& y_a, const Vector& z_a);

struct FigureColumns {
  Vector w;             // fitted combination of y and z
  Vector psi_demeaned;  // Psi_a - mean(Psi_a)
};

FigureColumns figure_projection(const Vector& psi_a, const Vector& y_a, const Vector& z_a,
                                const StyleRegressionReport& report);

}  // namespace alphacomb
