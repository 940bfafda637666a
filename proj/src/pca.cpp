#include "alphacomb/pca.hpp"

#include <cmath>

#include "alphacomb/parallel.hpp"
#include "alphacomb/regress.hpp"

namespace alphacomb {

namespace {

/// Symmetric square root of phi = (I + u u^T)/M, analytically:
/// (I + a u u^T)/sqrt(M) with a = (sqrt(1 + M) - 1)/M.
Matrix phi_sqrt(Index m) {
  const double a = (std::sqrt(1.0 + double(m)) - 1.0) / double(m);
  Matrix s = Matrix::Constant(m, m, a / std::sqrt(double(m)));
  s.diagonal().array() += 1.0 / std::sqrt(double(m));
  return s;
}

}  // namespace

PcDecomposition correlation_pcs(const NormalizedLoadings& y) {
  if (y.variant != NormalizedLoadings::Variant::Raw)
    throw ValidationError("correlation_pcs requires the raw Y variant");
  const Index n = y.y.rows();
  const Index m = y.y.cols();

  const Matrix s = phi_sqrt(m);
  const Matrix g = s * blocked_gram(y.y) * s;  // = Z^T Z with Z = Y phi^(1/2)
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("correlation_pcs: eigensolver failed");

  PcDecomposition out;
  out.eigenvalues.resize(m);
  out.components.resize(n, m);
  // Ascending from Eigen; emit nonincreasing. V = Z W lambda^(-1/2).
  const Matrix w = es.eigenvectors();
  for (Index a = 0; a < m; ++a) {
    const Index src = m - 1 - a;
    const double lam = std::max(es.eigenvalues()[src], 0.0);
    out.eigenvalues[a] = lam;
    if (lam > 0.0) {
      const Vector dir = s * w.col(src) / std::sqrt(lam);
      out.components.col(a) = y.y * dir;
    } else {
      out.components.col(a).setZero();
    }
    // Deterministic sign: largest-magnitude entry positive.
    Index arg = 0;
    out.components.col(a).cwiseAbs().maxCoeff(&arg);
    if (out.components(arg, a) < 0.0) out.components.col(a) = -out.components.col(a);
  }
  out.theta = out.components.col(0).sum() / std::sqrt(double(n));
  return out;
}

PcSpecificRisks pc_specific_risks(const PcDecomposition& pcs, const Vector& sigma, Index k,
                                  double zeta) {
  const Index m = pcs.eigenvalues.size();
  const Index n = pcs.components.rows();
  if (k < 1 || k >= m) throw ValidationError("pc_specific_risks requires 1 <= K < M");
  if (!(zeta > 0.0) || zeta > 1.0) throw ValidationError("pc_specific_risks requires zeta in (0, 1]");
  if (sigma.size() != n) throw ValidationError("pc_specific_risks: sigma length mismatch");

  PcSpecificRisks out;
  Vector tail = Vector::Zero(n);
  for (Index a = k; a < m; ++a)
    tail += pcs.eigenvalues[a] * pcs.components.col(a).array().square().matrix();
  out.xi_sq = zeta * sigma.array().square() * tail.array();
  for (Index i = 0; i < n; ++i)
    if (out.xi_sq[i] <= 0.0) out.violations.push_back(i);
  return out;
}

double span_equivalence(const NormalizedLoadings& y, const PcDecomposition& pcs, const Vector& e) {
  if (y.variant != NormalizedLoadings::Variant::Raw)
    throw ValidationError("span_equivalence requires the raw Y variant");
  const RegressionResult over_y = weighted_residuals(e, y.y, Vector());
  Index rank = 0;
  while (rank < pcs.eigenvalues.size() && pcs.eigenvalues[rank] > 0.0) ++rank;
  const RowMatrix v = pcs.components.leftCols(rank);
  const RegressionResult over_v = weighted_residuals(e, v, Vector());
  return (over_y.residuals - over_v.residuals).cwiseAbs().maxCoeff();
}

}  // namespace alphacomb
