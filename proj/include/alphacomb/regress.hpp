#pragma once

#include "alphacomb/riskmodel.hpp"

namespace alphacomb {

struct RegressionResult {
  Vector residuals;       // N
  Vector coefficients;    // m
  GramMatrix gram;        // Upsilon = L^T Z L
  double condition_estimate = 0.0;
};

/// Residuals of the cross-sectional weighted regression of e over the
/// loading columns, no intercept: eps = E - L (L^T Z L)^-1 L^T Z E.
/// Solved via Gram normal equations, O(m^2 N + m^3). Pass z of size 0 for
/// unit weights.
RegressionResult weighted_residuals(const Vector& e, const Eigen::Ref<const RowMatrix>& loadings,
                                    const Vector& z);

/// Exact factor-model optimum via the small-matrix identity:
/// w_i = (eta/xi_i)[E~_i - sum_A beta_iA (Q^-1 beta^T E~)_A], Q = I + beta^T beta.
/// O(K^2 N + K^3), no dense N x N work.
WeightVector exact_factor_weights(const ExpectedReturns& e, const FactorModel& model);

struct RegressionLimitResult {
  WeightVector weights;
  double min_q_diag = 0.0;  // min_A q_AA, the Q ~ q approximation diagnostic
};

/// Large-N limit: weights eta * z_i * eps_i from the weighted regression of
/// E over the unscaled loadings with z_i = 1/xi_i^2.
RegressionLimitResult regression_limit_weights(const ExpectedReturns& e, const FactorModel& model);

/// Greedy left-to-right selection of linearly independent columns from a
/// Gram matrix; returns kept column indices in ascending order.
std::vector<Index> independent_columns(const Matrix& gram, double rel_tol = 1e-10);

}  // namespace alphacomb
