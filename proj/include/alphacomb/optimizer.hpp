#pragma once

#include <optional>

#include "alphacomb/regress.hpp"

namespace alphacomb {

enum class WeightSource { SampleVariance, Precomputed, PcSpecific };
enum class AugmentMode { Replace, Union };

struct CombineOptions {
  bool remove_overall_mode = true;
  WeightSource weight_source = WeightSource::SampleVariance;
  Vector precomputed_xi;                 // used when weight_source = Precomputed
  Index pc_k = 1;                        // PcSpecific: 1 <= K <= M-1
  double pc_zeta = 1.0;                  //             zeta in (0, 1]
  std::optional<Matrix> external_loadings;
  AugmentMode augment_mode = AugmentMode::Replace;
};

struct CombineResult {
  WeightVector weights;
  Vector sigma;            // the xi used for normalization
  double min_q_diag = 0.0; // min diagonal of the regression Gram
  Index negative_count = 0;
  Vector residuals;        // regression residuals eps~_i
};

/// End-to-end pipeline: serial demean, variances (or chosen xi), normalize,
/// trim, optional cross-sectional demean and trim, regress E/sigma over the
/// loadings with unit weights, w = eta * eps / sigma. O(M^2 N) total.
CombineResult combine(const ReturnsPanel& panel, const ExpectedReturns& e,
                      const CombineOptions& opts = {});

/// w = normalize(C^-1 E) via dense factorization. Oracle only.
WeightVector dense_oracle_weights(const Matrix& cov, const ExpectedReturns& e);

/// Closed form for the uniform-correlation 1-factor model (exact):
/// w_i = (eta/xi_i)[E~_i - rho/(1+(N-1)rho) * sum_j E~_j], xi = sqrt(1-rho) sigma.
WeightVector one_factor_weights(const ExpectedReturns& e, const Vector& sigma, double rho);

/// Diagonal-covariance baseline: normalized E_i / sigma_i^2.
WeightVector benchmark_weights(const ExpectedReturns& e, const Vector& sigma);

/// Intentionally naive transliteration of the reference weight algorithm,
/// kept frozen as a parity fixture for the fast pipeline.
Vector reference_combine(const Vector& e, const RowMatrix& returns,
                         const std::optional<Matrix>& y_override, const Vector& s_override,
                         bool rm_overall, AugmentMode augment_mode = AugmentMode::Replace);

/// Max |w_fast - w_naive| between the pipeline and the frozen reference.
double reference_parity(const ReturnsPanel& panel, const ExpectedReturns& e,
                        const CombineOptions& opts);

}  // namespace alphacomb
