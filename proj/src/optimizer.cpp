#include "alphacomb/optimizer.hpp"

#include <cmath>

#include "alphacomb/parallel.hpp"
#include "alphacomb/pca.hpp"

namespace alphacomb {

namespace {

struct RowMoments {
  Vector mean;
  Vector sigma;  // sqrt of (1/M) sum X^2
};

RowMoments row_moments(const ReturnsPanel& panel) {
  const Index n = panel.n_alphas();
  const Index m = panel.m();
  RowMoments out;
  out.mean.resize(n);
  out.sigma.resize(n);
  for_each_block(n, [&](Index, Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      const auto row = panel.returns.row(i);
      const double mu = row.mean();
      out.mean[i] = mu;
      out.sigma[i] = std::sqrt((row.array() - mu).square().sum() / double(m));
    }
  });
  for (Index i = 0; i < n; ++i) {
    if (!(out.sigma[i] > 0.0))
      throw NumericError("degenerate alpha at row " + std::to_string(i) + ": zero variance");
  }
  return out;
}

Vector choose_xi(const ReturnsPanel& panel, const RowMoments& mom, const CombineOptions& opts) {
  switch (opts.weight_source) {
    case WeightSource::SampleVariance:
      return mom.sigma;
    case WeightSource::Precomputed: {
      if (opts.precomputed_xi.size() != panel.n_alphas())
        throw ValidationError("precomputed xi length does not match panel N");
      if ((opts.precomputed_xi.array() <= 0.0).any())
        throw ValidationError("precomputed xi must be strictly positive");
      return opts.precomputed_xi;
    }
    case WeightSource::PcSpecific: {
      const Index m = panel.m();
      if (opts.pc_k < 1 || opts.pc_k > m - 1)
        throw ValidationError("pc_specific requires 1 <= K <= M-1");
      if (!(opts.pc_zeta > 0.0) || opts.pc_zeta > 1.0)
        throw ValidationError("pc_specific requires zeta in (0, 1]");
      NormalizedLoadings y;
      y.variant = NormalizedLoadings::Variant::Raw;
      y.y.resize(panel.n_alphas(), m);
      for_each_block(panel.n_alphas(), [&](Index, Index begin, Index end) {
        for (Index i = begin; i < end; ++i)
          y.y.row(i) =
              ((panel.returns.row(i).head(m).array() - mom.mean[i]) / mom.sigma[i]).matrix();
      });
      const PcDecomposition pcs = correlation_pcs(y);
      const PcSpecificRisks sr = pc_specific_risks(pcs, mom.sigma, opts.pc_k, opts.pc_zeta);
      // Nonpositive specific variances: fall back to sample variances rather
      // than repair (repair is out of scope).
      if (!sr.violations.empty()) return mom.sigma;
      return sr.xi_sq.cwiseSqrt();
    }
  }
  throw ValidationError("unknown weight source");
}

CombineResult finish(const Vector& e_values, const RowMatrix& loadings, const Vector& xi) {
  const Vector e_tilde = (e_values.array() / xi.array()).matrix();
  const RegressionResult reg = weighted_residuals(e_tilde, loadings, Vector());
  CombineResult out;
  out.residuals = reg.residuals;
  out.sigma = xi;
  out.min_q_diag = reg.gram.upsilon.diagonal().minCoeff();
  out.weights = normalize_weights((reg.residuals.array() / xi.array()).matrix());
  out.negative_count = (out.weights.weights.array() < 0.0).count();
  return out;
}

}  // namespace

CombineResult combine(const ReturnsPanel& panel, const ExpectedReturns& e,
                      const CombineOptions& opts) {
  const Index n = panel.n_alphas();
  const Index m = panel.m();
  e.validate(n);

  const RowMoments mom = row_moments(panel);
  const Vector xi = choose_xi(panel, mom, opts);

  if (opts.external_loadings && opts.augment_mode == AugmentMode::Replace) {
    // Pre-computed loadings take the place of the return-based columns.
    Matrix l = *opts.external_loadings;
    if (l.rows() != n) throw ValidationError("external loadings rows do not match panel N");
    if (opts.remove_overall_mode) {
      if (l.cols() < 2) throw ValidationError("insufficient loading columns after mode removal");
      l = (l.rowwise() - l.colwise().mean()).leftCols(l.cols() - 1).eval();
    }
    return finish(e.values, RowMatrix(l), xi);
  }

  if (opts.external_loadings && opts.augment_mode == AugmentMode::Union) {
    // Union of the M return columns with the external columns, with any
    // linearly dependent columns removed.
    Matrix l(n, m + opts.external_loadings->cols());
    for (Index i = 0; i < n; ++i)
      l.row(i).head(m) =
          ((panel.returns.row(i).head(m).array() - mom.mean[i]) / xi[i]).matrix();
    l.rightCols(opts.external_loadings->cols()) = *opts.external_loadings;
    const std::vector<Index> kept = independent_columns(l.transpose() * l);
    Matrix sel(n, static_cast<Index>(kept.size()));
    Index y_cols = 0;
    for (size_t c = 0; c < kept.size(); ++c) {
      sel.col(static_cast<Index>(c)) = l.col(kept[c]);
      if (kept[c] < m) ++y_cols;
    }
    if (opts.remove_overall_mode) {
      if (sel.cols() < 2) throw ValidationError("insufficient loading columns after mode removal");
      // Demean, apply the drop-last convention to the return block, then
      // re-check rank: demeaning can zero out an external column (anything
      // proportional to u), which the pre-demean check cannot see.
      sel = (sel.rowwise() - sel.colwise().mean()).eval();
      Matrix trimmed(n, sel.cols() - 1);
      trimmed.leftCols(y_cols - 1) = sel.leftCols(y_cols - 1);
      trimmed.rightCols(sel.cols() - y_cols) = sel.rightCols(sel.cols() - y_cols);
      const std::vector<Index> kept2 = independent_columns(trimmed.transpose() * trimmed);
      sel.resize(n, static_cast<Index>(kept2.size()));
      for (size_t c = 0; c < kept2.size(); ++c)
        sel.col(static_cast<Index>(c)) = trimmed.col(kept2[c]);
      if (sel.cols() < 1) throw ValidationError("no independent loading columns remain");
    }
    return finish(e.values, RowMatrix(sel), xi);
  }

  // Fast path: the loadings matrix is built directly at its final width so
  // the peak footprint is one N x keep buffer.
  const Index keep = opts.remove_overall_mode ? m - 1 : m;
  if (keep < 1) throw ValidationError("insufficient observations after mode removal");

  Vector colmean = Vector::Zero(keep);
  if (opts.remove_overall_mode) {
    const Index nblocks = block_count(n);
    std::vector<Vector> partial(nblocks);
    for_each_block(n, [&](Index b, Index begin, Index end) {
      Vector acc = Vector::Zero(keep);
      for (Index i = begin; i < end; ++i)
        acc += ((panel.returns.row(i).head(keep).array() - mom.mean[i]) / xi[i])
                   .matrix()
                   .transpose();
      partial[b] = std::move(acc);
    });
    for (const auto& p : partial) colmean += p;
    colmean /= double(n);
  }

  RowMatrix loadings(n, keep);
  for_each_block(n, [&](Index, Index begin, Index end) {
    for (Index i = begin; i < end; ++i)
      loadings.row(i) = ((panel.returns.row(i).head(keep).array() - mom.mean[i]) / xi[i] -
                         colmean.transpose().array())
                            .matrix();
  });
  return finish(e.values, loadings, xi);
}

WeightVector dense_oracle_weights(const Matrix& cov, const ExpectedReturns& e) {
  require_dense_cap(cov.rows(), "dense_oracle_weights");
  if (cov.rows() != cov.cols() || cov.rows() != e.values.size())
    throw ValidationError("dense_oracle_weights: shape mismatch");
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericError("dense_oracle_weights: covariance is not positive definite");
  return normalize_weights(llt.solve(e.values));
}

WeightVector one_factor_weights(const ExpectedReturns& e, const Vector& sigma, double rho) {
  const Index n = sigma.size();
  e.validate(n);
  if (!(rho > -1.0 / double(n - 1)) || !(rho < 1.0))
    throw ValidationError("rho outside the positive-definite range (-1/(N-1), 1)");
  const Vector xi = std::sqrt(1.0 - rho) * sigma;
  const Vector e_tilde = (e.values.array() / xi.array()).matrix();
  const double shift = rho / (1.0 + double(n - 1) * rho) * e_tilde.sum();
  return normalize_weights(((e_tilde.array() - shift) / xi.array()).matrix());
}

WeightVector benchmark_weights(const ExpectedReturns& e, const Vector& sigma) {
  e.validate(sigma.size());
  if ((sigma.array() <= 0.0).any()) throw ValidationError("sigma must be strictly positive");
  return normalize_weights((e.values.array() / sigma.array().square()).matrix());
}

Vector reference_combine(const Vector& e, const RowMatrix& returns,
                         const std::optional<Matrix>& y_override, const Vector& s_override,
                         bool rm_overall, AugmentMode augment_mode) {
  // Frozen line-by-line transliteration of the reference R routine; dense
  // Eigen throughout, no blocked kernels, no shortcuts.
  const Index n = returns.rows();
  Vector s = s_override;
  if (s.size() == 0) {
    s.resize(n);
    for (Index i = 0; i < n; ++i) {
      const double mu = returns.row(i).mean();
      s[i] = std::sqrt((returns.row(i).array() - mu).square().sum() /
                       double(returns.cols() - 1));
    }
  }

  Matrix y;
  Index union_y_cols = -1;
  if (!y_override || augment_mode == AugmentMode::Union) {
    Matrix x = returns;
    for (Index i = 0; i < n; ++i) x.row(i).array() -= x.row(i).mean();
    for (Index i = 0; i < n; ++i) x.row(i) /= s[i];
    y = x.leftCols(x.cols() - 1);
    if (y_override && augment_mode == AugmentMode::Union) {
      const Index m_block = y.cols();
      Matrix both(n, y.cols() + y_override->cols());
      both.leftCols(y.cols()) = y;
      both.rightCols(y_override->cols()) = *y_override;
      const std::vector<Index> kept = independent_columns(both.transpose() * both);
      y.resize(n, static_cast<Index>(kept.size()));
      union_y_cols = 0;
      for (size_t c = 0; c < kept.size(); ++c) {
        y.col(static_cast<Index>(c)) = both.col(kept[c]);
        if (kept[c] < m_block) ++union_y_cols;
      }
    }
  } else {
    y = *y_override;
  }

  if (rm_overall) {
    y = (y.rowwise() - y.colwise().mean()).eval();
    if (union_y_cols < 0) {
      y = y.leftCols(y.cols() - 1).eval();
    } else {
      // drop the last return-block column, then re-check rank (same
      // convention as the fast path)
      Matrix trimmed(n, y.cols() - 1);
      trimmed.leftCols(union_y_cols - 1) = y.leftCols(union_y_cols - 1);
      trimmed.rightCols(y.cols() - union_y_cols) = y.rightCols(y.cols() - union_y_cols);
      const std::vector<Index> kept2 = independent_columns(trimmed.transpose() * trimmed);
      y.resize(n, static_cast<Index>(kept2.size()));
      for (size_t c = 0; c < kept2.size(); ++c)
        y.col(static_cast<Index>(c)) = trimmed.col(kept2[c]);
    }
  }

  Vector er = (e.array() / s.array()).matrix();
  Vector w = y.transpose() * er;
  w = (y.transpose() * y).inverse() * w;
  w = er - y * w;
  w = (w.array() / s.array()).matrix();
  w /= w.cwiseAbs().sum();
  return w;
}

double reference_parity(const ReturnsPanel& panel, const ExpectedReturns& e,
                        const CombineOptions& opts) {
  const CombineResult fast = combine(panel, e, opts);
  Vector s_override;
  if (opts.weight_source == WeightSource::Precomputed) s_override = opts.precomputed_xi;
  const Vector naive =
      reference_combine(e.values, panel.returns, opts.external_loadings, s_override,
                        opts.remove_overall_mode, opts.augment_mode);
  return (fast.weights.weights - naive).cwiseAbs().maxCoeff();
}

}  // namespace alphacomb
