#include "alphacomb/regress.hpp"

#include <cmath>

#include "alphacomb/parallel.hpp"

namespace alphacomb {

RegressionResult weighted_residuals(const Vector& e, const Eigen::Ref<const RowMatrix>& loadings,
                                    const Vector& z) {
  const Index n = loadings.rows();
  const Index m = loadings.cols();
  if (e.size() != n) throw ValidationError("weighted_residuals: e length does not match loadings");
  if (m >= n) throw ValidationError("weighted_residuals: requires m < N");
  if (z.size() != 0) {
    if (z.size() != n) throw ValidationError("weighted_residuals: weight length mismatch");
    if ((z.array() <= 0.0).any())
      throw ValidationError("weighted_residuals: weights must be strictly positive");
  }

  RegressionResult res;
  res.gram.upsilon =
      z.size() == 0 ? blocked_gram(loadings) : blocked_weighted_gram(loadings, z);
  res.gram.upsilon = 0.5 * (res.gram.upsilon + res.gram.upsilon.transpose().eval());
  const Vector rhs = blocked_tprod(loadings, e, z);

  Eigen::LDLT<Matrix> ldlt(res.gram.upsilon);
  const Vector d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  Index pivot_pos = 0;
  const double dmin = d.minCoeff(&pivot_pos);
  res.condition_estimate = dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity();
  if (ldlt.info() != Eigen::Success || !(dmin > 0.0) || res.condition_estimate > 1e12) {
    Eigen::VectorXi idx = Eigen::VectorXi::LinSpaced(int(m), 0, int(m - 1));
    idx = ldlt.transpositionsP() * idx;
    const Index col = idx(pivot_pos);
    throw NumericError("singular design: Gram condition estimate " +
                       std::to_string(res.condition_estimate) + ", smallest pivot at column " +
                       std::to_string(col));
  }

  res.coefficients = ldlt.solve(rhs);
  res.residuals.resize(n);
  for_each_block(n, [&](Index, Index begin, Index end) {
    res.residuals.segment(begin, end - begin) =
        e.segment(begin, end - begin) -
        loadings.middleRows(begin, end - begin) * res.coefficients;
  });
  return res;
}

WeightVector exact_factor_weights(const ExpectedReturns& e, const FactorModel& model) {
  model.validate();
  const Index n = model.n();
  e.validate(n);
  const Vector e_tilde = e.values.array() / model.xi.array();

  Vector raw;
  if (model.k() == 0) {
    raw = e_tilde.array() / model.xi.array();
  } else {
    const RowMatrix beta = scaled_loadings(model);
    Matrix q = blocked_gram(beta);
    q.diagonal().array() += 1.0;  // Q = I + beta^T beta
    Eigen::LLT<Matrix> llt(q);
    if (llt.info() != Eigen::Success)
      throw NumericError("exact_factor_weights: Q factorization failed");
    const Vector a = llt.solve(blocked_tprod(beta, e_tilde, Vector()));
    raw.resize(n);
    for_each_block(n, [&](Index, Index begin, Index end) {
      raw.segment(begin, end - begin) =
          (e_tilde.segment(begin, end - begin) - beta.middleRows(begin, end - begin) * a)
              .array() /
          model.xi.segment(begin, end - begin).array();
    });
  }
  return normalize_weights(raw);
}

RegressionLimitResult regression_limit_weights(const ExpectedReturns& e, const FactorModel& model) {
  model.validate();
  const Index n = model.n();
  e.validate(n);
  const Vector z = model.xi.array().square().inverse();

  RegressionLimitResult out;
  if (model.k() == 0) {
    out.weights = normalize_weights((z.array() * e.values.array()).matrix());
    out.min_q_diag = 0.0;
    return out;
  }

  Matrix chol;
  {
    Eigen::LLT<Matrix> llt(model.phi);
    if (llt.info() != Eigen::Success) {
      // Reuse the PSD-tolerant path through scaled loadings.
      chol = Matrix();
    } else {
      chol = llt.matrixL();
    }
  }
  const RowMatrix beta_tilde =
      chol.size() > 0 ? RowMatrix(model.omega * chol)
                      : RowMatrix(scaled_loadings(model).array().colwise() * model.xi.array());

  const RegressionResult reg = weighted_residuals(e.values, beta_tilde, z);
  out.weights = normalize_weights((z.array() * reg.residuals.array()).matrix());

  // q_AA = sum_i z_i beta~_iA^2; far above 1 means Q ~ q is a good swap.
  const Matrix q = blocked_weighted_gram(beta_tilde, z);
  out.min_q_diag = q.diagonal().minCoeff();
  return out;
}

std::vector<Index> independent_columns(const Matrix& gram, double rel_tol) {
  const Index m = gram.cols();
  std::vector<Index> kept;
  const double scale = m > 0 ? gram.diagonal().maxCoeff() : 0.0;
  Matrix l(m, m);  // growing lower-triangular factor over kept columns
  for (Index j = 0; j < m; ++j) {
    // numerically dead columns must be judged against the global scale,
    // not their own (possibly vanishing) diagonal
    if (!(gram(j, j) > rel_tol * scale)) continue;
    const Index r = static_cast<Index>(kept.size());
    Vector c(r);
    for (Index t = 0; t < r; ++t) c[t] = gram(kept[t], j);
    Vector y = l.topLeftCorner(r, r).triangularView<Eigen::Lower>().solve(c);
    const double d = gram(j, j) - y.squaredNorm();
    if (gram(j, j) > 0.0 && d > rel_tol * gram(j, j)) {
      l.row(r).head(r) = y.transpose();
      l(r, r) = std::sqrt(d);
      kept.push_back(j);
    }
  }
  return kept;
}

}  // namespace alphacomb
