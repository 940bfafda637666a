#pragma once

#include "alphacomb/panel.hpp"

namespace alphacomb {

/// Serially demeaned returns X_is = R_is - mean_s R_is; every row sums to 0.
struct DemeanedPanel {
  RowMatrix x;   // N x (M+1)

  Index n_alphas() const { return x.rows(); }
  Index m() const { return x.cols() - 1; }
};

/// Normalized return loadings. Raw variant Y_is has M columns; the demeaned
/// variant Lambda_is additionally has zero-mean columns and M-1 of them.
struct NormalizedLoadings {
  enum class Variant { Raw, Demeaned };
  RowMatrix y;
  Variant variant = Variant::Raw;
};

/// m x m symmetric Gram matrix Upsilon = L^T L.
struct GramMatrix {
  Matrix upsilon;
};

DemeanedPanel serial_demean(const ReturnsPanel& panel);

/// sigma_i^2 = (1/M) sum_s X_is^2, strictly positive.
Vector sample_variances(const DemeanedPanel& x);

/// Y_is = X_is / sigma_i over columns 1..M. With remove_overall_mode set,
/// also cross-sectionally demeans and keeps columns 1..M-1.
NormalizedLoadings normalize_and_trim(const DemeanedPanel& x, const Vector& sigma,
                                      bool remove_overall_mode);

/// phi = (I + u u^T) / M, the nonsingular M x M kernel of the SCM factored
/// form. u is the unit M-vector.
Matrix phi_kernel(Index m);

/// Dense sample correlation matrix Psi = Y phi Y^T. Oracle only: refuses
/// N above the dense cap.
Matrix sample_correlation_dense(const NormalizedLoadings& y);

GramMatrix gram(const Eigen::Ref<const RowMatrix>& loadings);

}  // namespace alphacomb
