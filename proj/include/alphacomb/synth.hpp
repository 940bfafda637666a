#pragma once

#include "alphacomb/riskmodel.hpp"

namespace alphacomb {

/// Parameters for deterministic synthetic panel generation.
struct SynthSpec {
  Index n_alphas = 0;
  Index n_obs = 0;        // M+1
  Index true_k = 0;       // generating factor count
  double rho_min = 0.1;   // factor strength range
  double rho_max = 0.5;
  double vol_min = 0.5;   // true volatility range
  double vol_max = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthResult {
  ReturnsPanel panel;
  ExpectedReturns expected;
  FactorModel truth;    // the exact generating covariance
};

/// Draws returns from the exact factor-model covariance built from spec.
/// Deterministic in seed; rows use independent substreams so generation is
/// order-free across alphas.
SynthResult gen_synthetic(const SynthSpec& spec);

/// Builds a random K-factor ground-truth model (identity factor covariance,
/// loadings scaled by per-factor strengths drawn from the rho range).
FactorModel random_factor_model(Index n, Index k, double rho_min, double rho_max, double vol_min,
                                double vol_max, std::uint64_t seed);

/// 1-factor model with uniform pairwise correlation rho and the given vols:
/// xi_i = sqrt(1 - rho) sigma_i, loading column sqrt(rho) sigma_i.
FactorModel uniform_one_factor_model(const Vector& sigma, double rho);

/// Samples an N x (M+1) panel from any factor model covariance.
ReturnsPanel sample_panel(const FactorModel& model, Index n_obs, std::uint64_t seed);

/// Positive (log-normal) expected returns, deterministic in seed.
ExpectedReturns sample_expected(Index n, std::uint64_t seed);

}  // namespace alphacomb
