#pragma once

#include <optional>
#include <vector>

#include "alphacomb/stats.hpp"

namespace alphacomb {

/// Factor-model covariance Gamma_ij = xi_i^2 delta_ij + (Omega Phi Omega^T)_ij,
/// held in factored form; the dense N x N matrix is never materialized outside
/// the oracle paths.
struct FactorModel {
  Vector xi;      // N specific risks
  Matrix omega;   // N x K loadings
  Matrix phi;     // K x K factor covariance, symmetric PSD

  Index n() const { return xi.size(); }
  Index k() const { return omega.cols(); }

  /// Checks xi > 0, Phi symmetric, K <= N.
  void validate() const;
};

/// Shrinkage deformation spec: C~ = zeta * target + (1 - zeta) * SCM, with
/// target diagonal equal to the sample variances.
struct ShrinkageSpec {
  double zeta = 0.0;
  FactorModel target;
};

struct SpecificRiskReport {
  Vector xi_tilde_sq;             // per-alpha specific variances (correlation scale)
  std::vector<Index> violations;  // indices with xi~^2 <= 0
  std::optional<double> kappa;    // K = 1 only
  std::optional<double> lambda_star;
};

struct K1Condition {
  double lambda_star = 0.0;
  std::vector<Index> failing;     // indices with beta_i^2 > 1/lambda*
  bool all_pass() const { return failing.empty(); }
};

/// Dense Gamma per the factored form. Oracle only (cap-gated).
Matrix dense_covariance(const FactorModel& model);

/// beta_iA = (Omega chol(Phi))_iA / xi_i, so gamma = I + beta beta^T.
Matrix scaled_loadings(const FactorModel& model);

/// Column-orthonormalizes via the Cholesky of the Gram matrix H, preserving
/// the column span. Fails on rank-deficient input.
Matrix orthonormalize(const Eigen::Ref<const Matrix>& omega_tilde);

/// Phi_AB = Omega~^T Psi Omega~ computed through the factored correlation,
/// without materializing Psi: (Omega^T Y) phi (Y^T Omega).
Matrix project_fcm(const Eigen::Ref<const Matrix>& loadings, const NormalizedLoadings& y);

/// xi~_i^2 = 1 - (Omega~ Phi Omega~^T)_ii for orthonormal loadings.
/// Nonpositive values are reported, never repaired.
SpecificRiskReport specific_risks(const Eigen::Ref<const Matrix>& loadings, const Matrix& phi);

/// lambda* = (1/N) sum_ij Psi_ij via the M-dimensional contraction; flags
/// beta_i^2 > 1/lambda*. Requires sum beta^2 = 1.
K1Condition k1_sufficient_condition(const Vector& beta, const NormalizedLoadings& y);

/// The (K+M)-factor model equal to zeta * target + (1 - zeta) * SCM. For
/// zeta = 0 the specific risks are zero and the model is the SCM itself.
FactorModel shrink_scm(const DemeanedPanel& x, const ShrinkageSpec& spec);

struct PositionLoadings {
  Matrix omega_tilde;                    // N x K_kept, entries in [0, 1]
  std::vector<Index> dropped_columns;    // untraded instruments
  std::vector<std::string> instrument_ids;  // kept columns
};

/// Omega~_iA = (1/(M+1)) sum_s |P_iAs| (average relative exposure).
PositionLoadings position_loadings(const PositionHistory& pos);

/// Zero-mean log columns nu_i = ln(v_i / geometric mean) for each provided
/// vector, in order: volatility, turnover, momentum.
Matrix style_loadings(const Vector& sigma, const std::optional<Vector>& turnover,
                      const std::optional<Vector>& momentum);

}  // namespace alphacomb
