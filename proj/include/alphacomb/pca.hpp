#pragma once

#include "alphacomb/stats.hpp"

namespace alphacomb {

/// Principal components of the sample correlation matrix, computed through
/// the M x M Gram trick; Psi itself is never materialized.
struct PcDecomposition {
  Vector eigenvalues;   // nonincreasing, length M
  Matrix components;    // N x M, orthonormal unit columns V^(a)
  double theta = 0.0;   // (1/sqrt(N)) sum_i V^(1)_i
};

/// Eigendecomposes phi^(1/2) (Y^T Y) phi^(1/2) and maps back to N-space.
/// Sign convention: each component's largest-magnitude entry is positive.
PcDecomposition correlation_pcs(const NormalizedLoadings& y);

struct PcSpecificRisks {
  Vector xi_sq;                   // zeta * sigma^2 * sum_{a>K} lambda [V]^2
  std::vector<Index> violations;  // xi^2 <= 0
};

PcSpecificRisks pc_specific_risks(const PcDecomposition& pcs, const Vector& sigma, Index k,
                                  double zeta);

/// Max abs difference between regression residuals over the Y columns and
/// over the first M principal components (same span, same residuals).
double span_equivalence(const NormalizedLoadings& y, const PcDecomposition& pcs, const Vector& e);

}  // namespace alphacomb
